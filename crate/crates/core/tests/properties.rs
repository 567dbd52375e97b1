use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;
use qka_core::adversaries::{tp_entangling_attack, Adversary, AncillaPair, AncillaSpec, AttackSpec, TpView};
use qka_core::oracle::{detection_tree, oracle_per_particle_detection, oracle_run_detection};
use qka_core::protocol::{
    apply_corrections, extract_key, run_protocol, run_with_adversary, AuthTag, PartyIdentity, ProtocolConfig,
    SharedState,
};
use qka_core::qsim::{ghz_state, phi_plus_pairs, tensor, Basis, Gate, GhzLabel, StateVector};
use qka_core::rng::trial_rng;
use rand::RngCore;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn arb_state(max_qubits: usize) -> impl Strategy<Value = StateVector> {
    (1..=max_qubits)
        .prop_flat_map(|n| prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n))
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
}

fn arb_gate() -> impl Strategy<Value = Gate> {
    prop::sample::select(Gate::ALL.to_vec())
}

fn arb_basis() -> impl Strategy<Value = Basis> {
    prop::sample::select(Basis::BOTH.to_vec())
}

fn max_gap(a: &StateVector, b: &StateVector, scale: Complex64) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y * scale).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gates_and_measurements_preserve_norm(
        state in arb_state(5),
        ops in prop::collection::vec((arb_gate(), 0usize..5), 0..20),
        basis in arb_basis(),
        seed in any::<u64>(),
    ) {
        let n = state.num_qubits();
        let mut s = state;
        for (gate, q) in ops {
            s.apply_gate(gate, q % n).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
        let qubits: Vec<usize> = (0..n).step_by(2).collect();
        let record = s.measure(&qubits, basis, &mut trial_rng(seed, 0)).unwrap();
        prop_assert!((record.post_state.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn every_gate_squares_to_plus_or_minus_identity(state in arb_state(4), gate in arb_gate(), q in 0usize..4) {
        let q = q % state.num_qubits();
        let twice = state.clone().with_gate(gate, q).unwrap().with_gate(gate, q).unwrap();
        let expected = if gate == Gate::IY { -1.0 } else { 1.0 };
        prop_assert!(max_gap(&twice, &state, c(expected, 0.0)) < 1e-12);
    }

    #[test]
    fn phi_plus_pairs_decompose_diagonally_in_ghz_basis(m in 2usize..=5, a in any::<usize>(), b in any::<usize>()) {
        let (a, b) = (a % (1 << m), b % (1 << m));
        // Regroup (T1,P1,…,Tm,Pm) as (T1..Tm, P1..Pm).
        let order: Vec<usize> = (0..m).map(|i| 2 * i).chain((0..m).map(|i| 2 * i + 1)).collect();
        let pairs = phi_plus_pairs(m).unwrap().permuted(&order).unwrap();
        let la = GhzLabel::from_index(a, m).unwrap();
        let lb = GhzLabel::from_index(b, m).unwrap();
        let basis_vec = tensor(&ghz_state(&la), &ghz_state(&lb)).unwrap();
        let amp = basis_vec.inner(&pairs).unwrap().norm_sqr();
        let expected = if a == b { 0.5f64.powi(m as i32) } else { 0.0 };
        prop_assert!((amp - expected).abs() < 1e-12, "m={} a={} b={} amp={}", m, a, b, amp);
    }

    #[test]
    fn corrections_restore_the_zero_label(m in 2usize..=5, index in any::<usize>()) {
        let label = GhzLabel::from_index(index % (1 << m), m).unwrap();
        let mut shared = SharedState { state: ghz_state(&label), parties: m };
        apply_corrections(&mut shared, &label, &[]).unwrap();
        let target = ghz_state(&GhzLabel::zero(m).unwrap());
        prop_assert!((shared.state.fidelity(&target).unwrap() - 1.0).abs() < 1e-12);
        // Independently: Z on the first holder when the phase bit is set,
        // X on holder i when bit i is set.
        let mut manual = ghz_state(&label);
        manual.apply_if(label.bit(0), Gate::Z, 0).unwrap();
        for i in 1..m {
            manual.apply_if(label.bit(i), Gate::X, i).unwrap();
        }
        prop_assert!(manual.equals_up_to_phase(&target, 1e-12));
    }

    #[test]
    fn ghz_zero_outcomes_are_correlated(m in 2usize..=6, basis in arb_basis(), seed in any::<u64>()) {
        let ghz = ghz_state(&GhzLabel::zero(m).unwrap());
        let qubits: Vec<usize> = (0..m).collect();
        let mut rng = trial_rng(seed, 1);
        for _ in 0..16 {
            let record = ghz.measure(&qubits, basis, &mut rng).unwrap();
            let bits = record.bits().bits();
            match basis {
                Basis::Computational => prop_assert!(bits.iter().all(|&b| b == bits[0])),
                Basis::X => prop_assert_eq!(bits.iter().filter(|&&b| b).count() % 2, 0),
            }
        }
    }
}

#[test]
fn born_rule_frequencies_at_1e5_samples() {
    let samples = 100_000;
    let states = [
        StateVector::normalized(vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.1, -0.7), c(0.2, 0.0)]).unwrap(),
        StateVector::normalized(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap(),
        StateVector::normalized(vec![c(0.9, 0.0), c(0.1, 0.3), c(0.0, 0.0), c(0.0, -0.4)]).unwrap(),
    ];
    let mut rng = trial_rng(2024, 0);
    for (k, state) in states.iter().enumerate() {
        for basis in Basis::BOTH {
            let analytic = state.outcome_probabilities(&[0, 1], basis).unwrap();
            let mut counts = [0usize; 4];
            for _ in 0..samples {
                let record = state.measure(&[0, 1], basis, &mut rng).unwrap();
                counts[record.bits().to_index()] += 1;
            }
            for (outcome, &p) in analytic.iter().enumerate() {
                let freq = counts[outcome] as f64 / samples as f64;
                let se = (p * (1.0 - p) / samples as f64).sqrt();
                assert!(
                    (freq - p).abs() <= 4.0 * se + 1e-12,
                    "state {k} {basis:?} outcome {outcome}: {freq} vs {p}"
                );
            }
        }
    }
}

fn arb_config() -> impl Strategy<Value = ProtocolConfig> {
    (2usize..=4, 1usize..=16, 1usize..=4, 1usize..=6)
        .prop_map(|(m, n, delta, zeta)| ProtocolConfig::new(m, n, delta, zeta).unwrap())
}

/// Records the tags TP works with; otherwise honest.
#[derive(Default)]
struct TagRecorder {
    tags: Vec<AuthTag>,
}

impl Adversary for TagRecorder {
    fn tp_prepare(
        &mut self,
        _position: usize,
        _parties: usize,
        tp: &TpView<'_>,
        _rng: &mut dyn RngCore,
    ) -> qka_core::Result<Option<StateVector>> {
        if self.tags.is_empty() {
            self.tags = tp.tags.to_vec();
        }
        Ok(None)
    }
}

fn bit_string(tag: &AuthTag) -> String {
    tag.0.bits().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn honest_runs_never_err_and_keys_agree(config in arb_config(), seed in any::<u64>()) {
        let report = run_protocol(&config, None, &mut trial_rng(seed, 0)).unwrap();
        prop_assert!(report.passed);
        prop_assert_eq!(report.first_detection_errors, 0);
        prop_assert_eq!(report.second_detection_errors, 0);
        prop_assert!(report.keys_agree());
        let keys = report.keys.unwrap();
        prop_assert_eq!(keys.len(), config.parties);
        prop_assert!(keys.iter().all(|k| k.len() == config.key_len));
    }

    #[test]
    fn positions_partition_into_detection_sets_and_key(config in arb_config(), seed in any::<u64>()) {
        let report = run_protocol(&config, None, &mut trial_rng(seed, 0)).unwrap();
        let t = &report.transcript;
        prop_assert_eq!(t.detection_disclosures.len(), config.parties);
        let mut seen = BTreeSet::new();
        for d in &t.detection_disclosures {
            prop_assert_eq!(d.positions.len(), config.delta);
            for &p in &d.positions {
                prop_assert!(p < config.total_positions());
                prop_assert!(seen.insert(p), "position {} consumed twice", p);
            }
        }
        prop_assert_eq!(config.total_positions() - seen.len(), config.key_len);
        prop_assert_eq!(t.ghz_announcements.len(), config.total_positions());
    }

    #[test]
    fn transcripts_never_carry_keys_or_tags(config in arb_config(), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        // Identities are the first values drawn from the stream.
        let mut shadow = rng.clone();
        let identities: Vec<PartyIdentity> =
            (1..=config.parties).map(|i| PartyIdentity::generate(i, &mut shadow)).collect();
        let mut recorder = TagRecorder::default();
        let report = run_with_adversary(&config, &mut recorder, &mut rng).unwrap();
        let json = serde_json::to_string(&report.transcript).unwrap();
        for id in &identities {
            prop_assert!(!json.contains(&hex::encode(&id.private_key)));
            prop_assert!(!json.contains(&hex::encode_upper(&id.private_key)));
        }
        prop_assert_eq!(recorder.tags.len(), config.parties);
        for tag in &recorder.tags {
            prop_assert_eq!(tag.len(), config.total_positions());
            if tag.len() >= 24 {
                prop_assert!(!json.contains(&bit_string(tag)));
            }
        }
    }

    #[test]
    fn entangling_errors_vanish_exactly_when_ancillas_coincide(r in 0.0..=1.0f64, seed in any::<u64>()) {
        let config = ProtocolConfig::new(3, 4, 1, 1).unwrap();
        let pair = AncillaPair::with_overlap(r).unwrap();
        let a = tp_entangling_attack(&pair, &config, &mut trial_rng(seed, 0)).unwrap();
        prop_assert!((a.x_basis_error_rate - (1.0 - r) / 2.0).abs() < 1e-10);
        prop_assert!(a.z_basis_error_rate.abs() < 1e-12);
        let unit = (pair.overlap().norm() - 1.0).abs() < 1e-10;
        prop_assert_eq!(a.x_basis_error_rate.abs() < 1e-10, unit);
        prop_assert_eq!(a.tp_guess_advantage.abs() < 1e-10, unit);
    }

    #[test]
    fn early_measurement_keeps_keys_equal(config in arb_config(), seed in any::<u64>(), bit in 0u8..=1) {
        let spec = AttackSpec::DishonestParticipant { party: 1, target_bit: bit, key_index: 0 };
        let report = run_protocol(&config, Some(&spec), &mut trial_rng(seed, 0)).unwrap();
        prop_assert!(report.passed);
        prop_assert!(report.keys_agree());
    }
}

#[test]
fn measurement_order_does_not_change_joint_key_distribution() {
    let m = 4;
    let positions: Vec<usize> = (0..4000).collect();
    let zero = ghz_state(&GhzLabel::zero(m).unwrap());
    let orders = [vec![0, 1, 2, 3], vec![3, 2, 1, 0], vec![2, 0, 3, 1]];
    let mut ones = Vec::new();
    for (k, order) in orders.iter().enumerate() {
        let mut states: Vec<SharedState> = positions
            .iter()
            .map(|_| SharedState { state: zero.clone(), parties: m })
            .collect();
        let keys = extract_key(&mut states, &positions, order, &mut trial_rng(77, k as u64)).unwrap();
        assert!(keys.windows(2).all(|w| w[0] == w[1]));
        ones.push(keys[0].count_ones());
    }
    // Every order gives the all-zero and all-one outcomes with probability ½.
    let n = positions.len() as f64;
    let se = (0.25 / n).sqrt();
    for count in &ones {
        assert!((*count as f64 / n - 0.5).abs() < 4.0 * se, "{ones:?}");
    }
    // Two orders against each other: difference of two proportions.
    let diff = (ones[0] as f64 - ones[1] as f64) / n;
    assert!(diff.abs() < 4.0 * (2.0 * 0.25 / n).sqrt());

    // Exactly: the marginal of any one party is unchanged by first measuring
    // the others, so the joint law is order-free.
    for first in 0..m {
        let record = zero.measure(&[first], Basis::Computational, &mut trial_rng(1, first as u64)).unwrap();
        let rest: Vec<usize> = (0..m).filter(|&q| q != first).collect();
        let probs = record.post_state.outcome_probabilities(&rest, Basis::Computational).unwrap();
        let bit = record.bits().get(0);
        let expected = if bit { (1 << (m - 1)) - 1 } else { 0 };
        assert!((probs[expected] - 1.0).abs() < 1e-12);
    }
}

fn every_attack() -> Vec<AttackSpec> {
    AttackSpec::KIND_NAMES
        .iter()
        .map(|k| AttackSpec::from_kind(k).unwrap())
        .chain([
            AttackSpec::ExternalInterceptResend { target: 2, attack_probability: 0.5, attack_signals: true },
            AttackSpec::Impersonation { target: 2, random_correction: true },
            AttackSpec::TpEntangling { ancilla: AncillaSpec::Overlap { overlap: 0.5 } },
        ])
        .collect()
}

#[test]
fn branch_trees_conserve_probability() {
    for m in 2..=4 {
        let honest = detection_tree(None, m).unwrap();
        assert!((honest.total_probability() - 1.0).abs() < 1e-12);
        let config = ProtocolConfig::new(m, 1, 1, 1).unwrap();
        for spec in every_attack() {
            if spec.validate(&config).is_err() {
                // Colluding parties 2 and 3 need m ≥ 3.
                continue;
            }
            let tree = detection_tree(Some(&spec), m).unwrap();
            assert!((tree.total_probability() - 1.0).abs() < 1e-12, "{spec:?} m={m}");
        }
    }
}

#[test]
fn honest_oracle_is_exactly_zero() {
    for m in 2..=4 {
        let config = ProtocolConfig::new(m, 16, 8, 16).unwrap();
        let run = oracle_run_detection(None, &config).unwrap();
        assert_eq!(run.per_decoy_error, 0.0);
        assert_eq!(run.per_particle.p_detect, 0.0);
        assert_eq!(run.p_abort, 0.0);
    }
}

#[test]
fn detectable_attacks_have_positive_detection() {
    for spec in every_attack() {
        let config = ProtocolConfig::new(3, 16, 8, 16).unwrap();
        let run = oracle_run_detection(Some(&spec), &config).unwrap();
        let insider = matches!(
            spec,
            AttackSpec::DishonestParticipant { .. } | AttackSpec::CollusiveParticipants { .. }
        );
        if insider {
            assert_eq!(run.p_abort, 0.0, "{spec:?}");
        } else {
            let per = oracle_per_particle_detection(Some(&spec), 3).unwrap();
            assert!(run.p_abort > 0.0 && (per.p_detect > 0.0 || run.per_decoy_error > 0.0), "{spec:?}");
        }
    }
}
