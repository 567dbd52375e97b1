//! Attack strategies as hooks on the protocol's channels and roles.
//!
//! An [`Adversary`] only ever sees what its role is entitled to: in-flight
//! particles on channels it taps, public announcements, and (for TP-role
//! attacks) TP's own authentication tags. Ground truth needed to score an
//! attack stays with the runner.

mod channel;
mod impersonation;
mod insider;
mod tp;

use num_complex::Complex64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use channel::{eve_intercept_resend, hash_leak_attack, EveRecord, ExternalInterceptResend, HashLeakInterceptResend};
pub use impersonation::{impersonation_attack, Impersonation};
pub use insider::{dishonest_measure_early, DishonestParticipants};
pub use tp::{
    helstrom_basis, tp_entangling_attack, tp_product_state_attack, AncillaPair, EntanglingAnalysis, TpEntangling,
    TpProductState,
};

use crate::bits::BitString;
use crate::error::{QkaError, Result};
use crate::protocol::{AuthTag, PositionState, ProtocolConfig, SharedState};
use crate::qsim::{Basis, Gate, GhzLabel, StateVector};

fn one() -> usize {
    1
}

fn full_probability() -> f64 {
    1.0
}

fn default_colluders() -> Vec<usize> {
    vec![2, 3]
}

/// Ancilla states for the entangling attack, either as a real overlap
/// `⟨θ₀|θ₁⟩ ∈ [0, 1]` or as explicit amplitude lists of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AncillaSpec {
    Overlap { overlap: f64 },
    Explicit { theta0: Vec<[f64; 2]>, theta1: Vec<[f64; 2]> },
}

impl Default for AncillaSpec {
    fn default() -> Self {
        AncillaSpec::Overlap { overlap: 0.0 }
    }
}

impl AncillaSpec {
    pub fn to_pair(&self) -> Result<AncillaPair> {
        match self {
            AncillaSpec::Overlap { overlap } => AncillaPair::with_overlap(*overlap),
            AncillaSpec::Explicit { theta0, theta1 } => {
                let conv = |v: &[[f64; 2]]| v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect::<Vec<_>>();
                AncillaPair::new(
                    StateVector::from_amplitudes(conv(theta0))?,
                    StateVector::from_amplitudes(conv(theta1))?,
                )
            }
        }
    }
}

/// Which attack to mount, with its parameters. Party indices are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackSpec {
    /// Eve measures particles on one channel in a random basis and resends.
    ExternalInterceptResend {
        #[serde(default = "one")]
        target: usize,
        /// Chance that Eve attacks any given particle.
        #[serde(default = "full_probability")]
        attack_probability: f64,
        /// Also attack signal particles, not only decoys.
        #[serde(default)]
        attack_signals: bool,
    },
    /// Eve keeps the real particles of one channel, forwards fakes, and tries
    /// to learn the target's auth tag bits from the detection disclosures.
    HashLeakInterceptResend {
        #[serde(default = "one")]
        target: usize,
        /// Skip the decoy check, as if Eve could pass it.
        #[serde(default)]
        second_detection_only: bool,
    },
    DishonestParticipant {
        #[serde(default = "one")]
        party: usize,
        #[serde(default)]
        target_bit: u8,
        #[serde(default)]
        key_index: usize,
    },
    CollusiveParticipants {
        #[serde(default = "default_colluders")]
        parties: Vec<usize>,
        #[serde(default)]
        target_bit: u8,
        #[serde(default)]
        key_index: usize,
    },
    TpProductState,
    TpEntangling {
        #[serde(default)]
        ancilla: AncillaSpec,
    },
    Impersonation {
        #[serde(default = "one")]
        target: usize,
        /// Apply a random I or X instead of the announced correction.
        #[serde(default)]
        random_correction: bool,
    },
}

impl AttackSpec {
    pub const KIND_NAMES: [&'static str; 7] = [
        "external_intercept_resend",
        "hash_leak_intercept_resend",
        "dishonest_participant",
        "collusive_participants",
        "tp_product_state",
        "tp_entangling",
        "impersonation",
    ];

    /// The attack of the given kind with default parameters.
    pub fn from_kind(name: &str) -> Result<Self> {
        if !Self::KIND_NAMES.contains(&name) {
            return Err(QkaError::field(
                "attack",
                format!("unknown attack kind '{name}'; expected one of {}", Self::KIND_NAMES.join(", ")),
            ));
        }
        serde_json::from_value(serde_json::json!({ "kind": name })).map_err(QkaError::from)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AttackSpec::ExternalInterceptResend { .. } => Self::KIND_NAMES[0],
            AttackSpec::HashLeakInterceptResend { .. } => Self::KIND_NAMES[1],
            AttackSpec::DishonestParticipant { .. } => Self::KIND_NAMES[2],
            AttackSpec::CollusiveParticipants { .. } => Self::KIND_NAMES[3],
            AttackSpec::TpProductState => Self::KIND_NAMES[4],
            AttackSpec::TpEntangling { .. } => Self::KIND_NAMES[5],
            AttackSpec::Impersonation { .. } => Self::KIND_NAMES[6],
        }
    }

    pub fn is_tp_role(&self) -> bool {
        matches!(self, AttackSpec::TpProductState | AttackSpec::TpEntangling { .. })
    }

    pub fn validate(&self, config: &ProtocolConfig) -> Result<()> {
        let m = config.parties;
        let party = |field: &'static str, p: usize| {
            if (1..=m).contains(&p) {
                Ok(())
            } else {
                Err(QkaError::field(field, format!("party {p} outside 1..={m}")))
            }
        };
        let bit = |b: u8| {
            if b <= 1 {
                Ok(())
            } else {
                Err(QkaError::field("attack.target_bit", "must be 0 or 1"))
            }
        };
        let index = |k: usize| {
            if k < config.key_len {
                Ok(())
            } else {
                Err(QkaError::field("attack.key_index", format!("must be below key_len {}", config.key_len)))
            }
        };
        match self {
            AttackSpec::ExternalInterceptResend {
                target,
                attack_probability,
                ..
            } => {
                party("attack.target", *target)?;
                if !(0.0..=1.0).contains(attack_probability) {
                    return Err(QkaError::field("attack.attack_probability", "must lie in [0, 1]"));
                }
            }
            AttackSpec::HashLeakInterceptResend { target, .. } | AttackSpec::Impersonation { target, .. } => {
                party("attack.target", *target)?
            }
            AttackSpec::DishonestParticipant {
                party: p,
                target_bit,
                key_index,
            } => {
                party("attack.party", *p)?;
                bit(*target_bit)?;
                index(*key_index)?;
            }
            AttackSpec::CollusiveParticipants {
                parties,
                target_bit,
                key_index,
            } => {
                if parties.is_empty() {
                    return Err(QkaError::field("attack.parties", "at least one colluder required"));
                }
                for (i, p) in parties.iter().enumerate() {
                    party("attack.parties", *p)?;
                    if parties[..i].contains(p) {
                        return Err(QkaError::field("attack.parties", format!("party {p} listed twice")));
                    }
                }
                bit(*target_bit)?;
                index(*key_index)?;
            }
            AttackSpec::TpProductState => {}
            AttackSpec::TpEntangling { ancilla } => {
                let pair = ancilla.to_pair().map_err(|e| QkaError::field("attack.ancilla", e.to_string()))?;
                if 2 * m + pair.qubits() > crate::qsim::MAX_QUBITS {
                    return Err(QkaError::field("attack.ancilla", "ancilla too large for this party count"));
                }
            }
        }
        Ok(())
    }

    /// Instantiates the attack for one run.
    pub fn build(&self, config: &ProtocolConfig) -> Result<Box<dyn Adversary>> {
        self.validate(config)?;
        Ok(match self {
            AttackSpec::ExternalInterceptResend {
                target,
                attack_probability,
                attack_signals,
            } => Box::new(ExternalInterceptResend::new(*target - 1, *attack_probability, *attack_signals)),
            AttackSpec::HashLeakInterceptResend {
                target,
                second_detection_only,
            } => Box::new(HashLeakInterceptResend::new(*target - 1, *second_detection_only)),
            AttackSpec::DishonestParticipant {
                party,
                target_bit,
                key_index,
            } => Box::new(DishonestParticipants::new(vec![*party - 1], *target_bit == 1, *key_index)),
            AttackSpec::CollusiveParticipants {
                parties,
                target_bit,
                key_index,
            } => Box::new(DishonestParticipants::new(
                parties.iter().map(|p| p - 1).collect(),
                *target_bit == 1,
                *key_index,
            )),
            AttackSpec::TpProductState => Box::new(TpProductState::new(config.key_len)),
            AttackSpec::TpEntangling { ancilla } => Box::new(TpEntangling::new(ancilla.to_pair()?)),
            AttackSpec::Impersonation {
                target,
                random_correction,
            } => Box::new(Impersonation::new(*target - 1, *random_correction)),
        })
    }
}

/// Which particles of a channel reach [`Adversary::on_particle`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelScope {
    DecoysOnly,
    All,
}

enum Particle<'a> {
    Signal {
        position: &'a mut PositionState,
        qubit: usize,
    },
    Decoy(&'a mut StateVector),
}

/// One particle in transit. The holder cannot tell a decoy from a signal.
pub struct InFlight<'a> {
    particle: Particle<'a>,
}

impl<'a> InFlight<'a> {
    pub(crate) fn signal(position: &'a mut PositionState, qubit: usize) -> Self {
        InFlight {
            particle: Particle::Signal { position, qubit },
        }
    }

    pub(crate) fn decoy(qubit: &'a mut StateVector) -> Self {
        InFlight {
            particle: Particle::Decoy(qubit),
        }
    }

    /// Measures the particle; it travels on in the post-measurement eigenstate.
    pub fn measure(&mut self, basis: Basis, rng: &mut dyn RngCore) -> Result<bool> {
        match &mut self.particle {
            Particle::Signal { position, qubit } => position.state.measure_qubit(*qubit, basis, rng),
            Particle::Decoy(q) => q.measure_qubit(0, basis, rng),
        }
    }

    /// Keeps the particle and forwards `fake` (one qubit) in its place.
    pub fn substitute(&mut self, fake: &StateVector) -> Result<()> {
        match &mut self.particle {
            Particle::Signal { position, qubit } => position.substitute(*qubit, fake).map(|_| ()),
            Particle::Decoy(q) => {
                if fake.num_qubits() != 1 {
                    return Err(QkaError::invalid("replacement must be a single qubit"));
                }
                **q = fake.clone();
                Ok(())
            }
        }
    }
}

/// TP's private role state, visible to TP-role attacks only.
pub struct TpView<'a> {
    pub tags: &'a [AuthTag],
}

/// What an attack asserts it achieved, scored later against ground truth.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum AttackClaims {
    #[default]
    None,
    Intercepted {
        count: usize,
    },
    /// `(position, inferred t bit)` for one party.
    InferredTagBits {
        party: usize,
        bits: Vec<(usize, bool)>,
    },
    KeyBitTarget {
        parties: Vec<usize>,
        target_bit: bool,
        key_index: usize,
    },
    KeyGuess {
        guess: BitString,
    },
    /// `(position, guessed t bit)` for the impersonated party.
    EncodingGuesses {
        party: usize,
        guesses: Vec<(usize, bool)>,
    },
}

/// Scored attack result carried in the run report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackOutcome {
    ExternalInterceptResend {
        intercepted: usize,
    },
    HashLeakInterceptResend {
        inferred_bits: usize,
        correct_bits: usize,
    },
    DishonestParticipant {
        target_bit: u8,
        key_index: usize,
        /// Key bit the run produced; absent when it aborted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        achieved_bit: Option<u8>,
    },
    TpKeyGuess {
        guessed_bits: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        correct_bits: Option<usize>,
    },
    Impersonation {
        guesses: usize,
        wrong_guesses: usize,
    },
}

/// Ground truth the runner holds for scoring.
pub(crate) struct GroundTruth<'a> {
    pub tags: &'a [AuthTag],
    pub keys: Option<&'a [BitString]>,
}

pub(crate) fn score(claims: AttackClaims, truth: &GroundTruth<'_>) -> Option<AttackOutcome> {
    Some(match claims {
        AttackClaims::None => return None,
        AttackClaims::Intercepted { count } => AttackOutcome::ExternalInterceptResend { intercepted: count },
        AttackClaims::InferredTagBits { party, bits } => AttackOutcome::HashLeakInterceptResend {
            inferred_bits: bits.len(),
            correct_bits: bits.iter().filter(|(p, t)| truth.tags[party].bit(*p) == *t).count(),
        },
        AttackClaims::KeyBitTarget {
            parties,
            target_bit,
            key_index,
        } => AttackOutcome::DishonestParticipant {
            target_bit: target_bit as u8,
            key_index,
            achieved_bit: truth.keys.map(|k| k[parties[0]].get(key_index) as u8),
        },
        AttackClaims::KeyGuess { guess } => AttackOutcome::TpKeyGuess {
            guessed_bits: guess.len(),
            correct_bits: truth
                .keys
                .map(|k| guess.len() - guess.hamming_distance(&k[0])),
        },
        AttackClaims::EncodingGuesses { party, guesses } => AttackOutcome::Impersonation {
            guesses: guesses.len(),
            wrong_guesses: guesses.iter().filter(|(p, t)| truth.tags[party].bit(*p) != *t).count(),
        },
    })
}

/// Hooks the runner calls at each protocol step. Every hook defaults to
/// honest behavior.
pub trait Adversary {
    /// TP's preparation of `position`. `Some` replaces the honest pairs; the
    /// state must use the `(T₁, P₁, …, T_m, P_m, extra…)` layout.
    fn tp_prepare(
        &mut self,
        _position: usize,
        _parties: usize,
        _tp: &TpView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<Option<StateVector>> {
        Ok(None)
    }

    /// Label TP announces given its actual GHZ outcome.
    fn tp_announce(&mut self, _position: usize, actual: &GhzLabel) -> GhzLabel {
        actual.clone()
    }

    /// Channel (0-based receiver) tapping.
    fn channel_scope(&self, _channel: usize) -> Option<ChannelScope> {
        None
    }

    fn on_particle(&mut self, _channel: usize, _slot: usize, _particle: InFlight<'_>, _rng: &mut dyn RngCore) -> Result<()> {
        Ok(())
    }

    fn first_detection_enabled(&self) -> bool {
        true
    }

    /// True when this attack plays `party` without its private key.
    fn impersonates(&self, _party: usize) -> bool {
        false
    }

    /// Encoding bit chosen for an impersonated party.
    fn encoding_bit(&mut self, _party: usize, _position: usize, rng: &mut dyn RngCore) -> bool {
        rng.next_u32() & 1 == 1
    }

    /// Correction an impersonated party applies; `None` is the honest one.
    fn correction(&mut self, _party: usize, _announced: &GhzLabel, _rng: &mut dyn RngCore) -> Option<Gate> {
        None
    }

    fn after_corrections(
        &mut self,
        _position: usize,
        _announced: &GhzLabel,
        _shared: &mut SharedState,
        _rng: &mut dyn RngCore,
    ) -> Result<()> {
        Ok(())
    }

    /// Called once per disclosed detection position after every party has
    /// measured.
    fn observe_detection(
        &mut self,
        _position: usize,
        _basis: Basis,
        _outcomes: &BitString,
        _shared: &mut SharedState,
        _rng: &mut dyn RngCore,
    ) -> Result<()> {
        Ok(())
    }

    /// Order in which participants measure their key positions.
    fn key_order(&self, parties: usize) -> Vec<usize> {
        (0..parties).collect()
    }

    fn after_key_extraction(
        &mut self,
        _key_positions: &[usize],
        _states: &mut [SharedState],
        _rng: &mut dyn RngCore,
    ) -> Result<()> {
        Ok(())
    }

    fn claims(&self) -> AttackClaims {
        AttackClaims::None
    }
}

/// Every role honest.
pub struct Honest;

impl Adversary for Honest {}
