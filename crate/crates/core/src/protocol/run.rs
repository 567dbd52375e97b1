//! One full session, setup to key extraction.

use rand::seq::index::sample;
use rand::RngCore;

use super::auth::{derive_auth_tag, random_nonce, AuthTag, PartyIdentity, HASH_FUNCTION_ID};
use super::config::ProtocolConfig;
use super::decoy::{check_decoys, transmit_with_decoys};
use super::detection::{detection_round, extract_key, PositionLedger};
use super::position::{apply_auth_encoding, apply_corrections, tp_prepare_position, tp_swap, PositionState, SharedState};
use super::transcript::{AbortReason, RunReport, Transcript};
use crate::adversaries::{score, Adversary, AttackSpec, ChannelScope, GroundTruth, Honest, InFlight, TpView};
use crate::error::Result;

/// Runs one session, with `attack` mounted if given.
pub fn run_protocol(config: &ProtocolConfig, attack: Option<&AttackSpec>, rng: &mut dyn RngCore) -> Result<RunReport> {
    config.validate()?;
    let mut adversary: Box<dyn Adversary> = match attack {
        Some(spec) => spec.build(config)?,
        None => Box::new(Honest),
    };
    run_with_adversary(config, adversary.as_mut(), rng)
}

/// Runs one session with caller-supplied hooks.
pub fn run_with_adversary(
    config: &ProtocolConfig,
    adversary: &mut dyn Adversary,
    rng: &mut dyn RngCore,
) -> Result<RunReport> {
    config.validate()?;
    let m = config.parties;
    let total = config.total_positions();

    // Setup: identities, random numbers, tags.
    let identities: Vec<PartyIdentity> = (1..=m).map(|i| PartyIdentity::generate(i, rng)).collect();
    let r_tp = random_nonce(rng);
    let r_parties: Vec<Vec<u8>> = (0..m).map(|_| random_nonce(rng)).collect();
    let tags: Vec<AuthTag> = identities
        .iter()
        .zip(&r_parties)
        .map(|(id, r)| derive_auth_tag(&id.private_key, &id.public_id, r, &r_tp, total))
        .collect();
    let mut transcript = Transcript {
        public_ids: identities
            .iter()
            .map(|id| String::from_utf8_lossy(&id.public_id).into_owned())
            .collect(),
        r_tp: hex::encode(&r_tp),
        r_parties: r_parties.iter().map(hex::encode).collect(),
        hash_function: HASH_FUNCTION_ID.to_string(),
        ..Transcript::default()
    };
    let mut first_errors = 0;
    let mut second_errors = 0;

    let finish = |adversary: &mut dyn Adversary,
                  transcript: Transcript,
                  keys: Option<Vec<_>>,
                  first: usize,
                  second: usize| {
        let attack = score(
            adversary.claims(),
            &GroundTruth {
                tags: &tags,
                keys: keys.as_deref(),
            },
        );
        RunReport {
            passed: keys.is_some(),
            keys,
            first_detection_errors: first,
            second_detection_errors: second,
            transcript,
            attack,
        }
    };

    // Preparation and transmission.
    let honest = tp_prepare_position(m)?;
    let tp_view = TpView { tags: &tags };
    let mut positions = Vec::with_capacity(total);
    for p in 0..total {
        let state = adversary.tp_prepare(p, m, &tp_view, rng)?.unwrap_or_else(|| honest.clone());
        positions.push(PositionState::new(state, m)?);
    }
    let mut records = Vec::with_capacity(m);
    for c in 0..m {
        let mut record = transmit_with_decoys(c + 1, total, config.zeta, rng)?;
        if let Some(scope) = adversary.channel_scope(c) {
            let (mut signal, mut decoy) = (0, 0);
            for slot in 0..record.padded_len(total) {
                if record.positions.get(decoy) == Some(&slot) {
                    let particle = InFlight::decoy(&mut record.qubits[decoy]);
                    adversary.on_particle(c, slot, particle, rng)?;
                    decoy += 1;
                } else {
                    if scope == ChannelScope::All {
                        let position = &mut positions[signal];
                        let qubit = position.party_qubit(c);
                        adversary.on_particle(c, slot, InFlight::signal(position, qubit), rng)?;
                    }
                    signal += 1;
                }
            }
        }
        records.push(record);
    }

    // Decoy checks.
    if adversary.first_detection_enabled() {
        for record in &records {
            let check = check_decoys(record, rng)?;
            first_errors += check.errors;
            transcript.decoy_disclosures.push(check.disclosure);
            if config.exceeds_threshold(check.errors, check.checked) {
                transcript.abort_reason = Some(AbortReason::FirstDetection {
                    channel: record.channel,
                    errors: check.errors,
                    checked: check.checked,
                });
                return Ok(finish(adversary, transcript, None, first_errors, second_errors));
            }
        }
    }

    // Per position: encoding, swap, corrections.
    let mut shared_states: Vec<SharedState> = Vec::with_capacity(total);
    for (p, mut position) in positions.into_iter().enumerate() {
        let tp_bits: Vec<bool> = tags.iter().map(|t| t.bit(p)).collect();
        let party_bits: Vec<bool> = (0..m)
            .map(|i| {
                if adversary.impersonates(i) {
                    adversary.encoding_bit(i, p, rng)
                } else {
                    tp_bits[i]
                }
            })
            .collect();
        apply_auth_encoding(&mut position, &tp_bits, &party_bits)?;
        let (actual, mut shared) = tp_swap(&position, rng)?;
        let announced = adversary.tp_announce(p, &actual);
        let overrides: Vec<_> = (0..m)
            .map(|i| {
                if adversary.impersonates(i) {
                    adversary.correction(i, &announced, rng)
                } else {
                    None
                }
            })
            .collect();
        apply_corrections(&mut shared, &announced, &overrides)?;
        adversary.after_corrections(p, &announced, &mut shared, rng)?;
        transcript.ghz_announcements.push(announced);
        shared_states.push(shared);
    }

    // Detection rounds, participant 1 first.
    let mut ledger = PositionLedger::new(total);
    for initiator in 0..m {
        let available = ledger.available();
        let mut chosen: Vec<usize> = sample(rng, available.len(), config.delta)
            .into_iter()
            .map(|k| available[k])
            .collect();
        chosen.sort_unstable();
        let disclosure = detection_round(initiator, &mut shared_states, &chosen, &mut ledger, rng)?;
        for (k, &p) in disclosure.positions.iter().enumerate() {
            adversary.observe_detection(p, disclosure.bases[k], &disclosure.outcomes[k], &mut shared_states[p], rng)?;
        }
        second_errors += disclosure.errors;
        let (errors, checked) = (disclosure.errors, disclosure.positions.len());
        transcript.detection_disclosures.push(disclosure);
        if config.exceeds_threshold(errors, checked) {
            transcript.abort_reason = Some(AbortReason::SecondDetection {
                initiator: initiator + 1,
                errors,
                checked,
            });
            return Ok(finish(adversary, transcript, None, first_errors, second_errors));
        }
    }

    // Key extraction on the remaining positions.
    let key_positions = ledger.available();
    let order = adversary.key_order(m);
    let keys = extract_key(&mut shared_states, &key_positions, &order, rng)?;
    adversary.after_key_extraction(&key_positions, &mut shared_states, rng)?;
    Ok(finish(adversary, transcript, Some(keys), first_errors, second_errors))
}
