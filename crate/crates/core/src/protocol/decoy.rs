//! Decoy particles and the first eavesdropping check.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QkaError, Result};
use crate::qsim::{Basis, Gate, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoyState {
    Zero,
    One,
    Plus,
    Minus,
}

impl DecoyState {
    pub const ALL: [DecoyState; 4] = [
        DecoyState::Zero,
        DecoyState::One,
        DecoyState::Plus,
        DecoyState::Minus,
    ];

    pub fn basis(self) -> Basis {
        match self {
            DecoyState::Zero | DecoyState::One => Basis::Computational,
            DecoyState::Plus | DecoyState::Minus => Basis::X,
        }
    }

    /// Outcome bit an honest measurement in [`basis`](Self::basis) yields.
    pub fn bit(self) -> bool {
        matches!(self, DecoyState::One | DecoyState::Minus)
    }

    pub fn prepare(self) -> StateVector {
        let mut q = StateVector::zero(1).expect("one qubit");
        if self.bit() {
            q.apply_gate(Gate::X, 0).expect("qubit 0");
        }
        if self.basis() == Basis::X {
            q.apply_gate(Gate::H, 0).expect("qubit 0");
        }
        q
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::ALL[rng.random_range(0..4)]
    }
}

/// Decoys TP mixed into one channel's particle sequence.
#[derive(Clone, Debug)]
pub struct DecoyRecord {
    /// 1-based receiving party.
    pub channel: usize,
    /// Slot indices of the decoys within the padded sequence, ascending.
    pub positions: Vec<usize>,
    pub states: Vec<DecoyState>,
    /// Decoy indices (into `states`) whose outcomes the receiver discloses;
    /// TP discloses the initial states of the rest.
    pub disclosed_half: Vec<usize>,
    /// Qubits as they arrive at the receiver.
    pub qubits: Vec<StateVector>,
}

impl DecoyRecord {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Length of the padded sequence `S'_i`.
    pub fn padded_len(&self, signal_count: usize) -> usize {
        signal_count + self.states.len()
    }
}

/// Prepares `zeta` decoys in uniformly random BB84 states and scatters them
/// uniformly among `signal_count + zeta` slots.
pub fn transmit_with_decoys<R: Rng + ?Sized>(
    channel: usize,
    signal_count: usize,
    zeta: usize,
    rng: &mut R,
) -> Result<DecoyRecord> {
    if zeta == 0 {
        return Err(QkaError::invalid("at least one decoy per channel is required"));
    }
    let mut positions = sample(rng, signal_count + zeta, zeta).into_vec();
    positions.sort_unstable();
    let states: Vec<DecoyState> = (0..zeta).map(|_| DecoyState::random(rng)).collect();
    let mut disclosed_half = sample(rng, zeta, zeta / 2).into_vec();
    disclosed_half.sort_unstable();
    let qubits = states.iter().map(|s| s.prepare()).collect();
    Ok(DecoyRecord {
        channel,
        positions,
        states,
        disclosed_half,
        qubits,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisclosedOutcome {
    pub decoy: usize,
    pub outcome: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisclosedState {
    pub decoy: usize,
    pub state: DecoyState,
}

/// Public record of one channel's decoy check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoyDisclosure {
    pub channel: usize,
    pub positions: Vec<usize>,
    pub bases: Vec<Basis>,
    pub receiver_outcomes: Vec<DisclosedOutcome>,
    pub tp_states: Vec<DisclosedState>,
    pub errors: usize,
}

#[derive(Clone, Debug)]
pub struct DecoyCheck {
    pub errors: usize,
    pub checked: usize,
    pub disclosure: DecoyDisclosure,
}

/// Receiver measures every decoy in the basis TP announces; half of the
/// outcomes are disclosed by the receiver, TP discloses the other half's
/// initial states, and both halves are compared against the preparation.
pub fn check_decoys<R: Rng + ?Sized>(record: &DecoyRecord, rng: &mut R) -> Result<DecoyCheck> {
    let mut errors = 0;
    let mut outcomes = Vec::with_capacity(record.len());
    for (state, qubit) in record.states.iter().zip(&record.qubits) {
        let outcome = qubit.measure(&[0], state.basis(), rng)?.bits().get(0);
        if outcome != state.bit() {
            errors += 1;
        }
        outcomes.push(outcome);
    }
    let receiver_outcomes = record
        .disclosed_half
        .iter()
        .map(|&i| DisclosedOutcome {
            decoy: i,
            outcome: outcomes[i] as u8,
        })
        .collect();
    let tp_states = (0..record.len())
        .filter(|i| !record.disclosed_half.contains(i))
        .map(|i| DisclosedState {
            decoy: i,
            state: record.states[i],
        })
        .collect();
    Ok(DecoyCheck {
        errors,
        checked: record.len(),
        disclosure: DecoyDisclosure {
            channel: record.channel,
            positions: record.positions.clone(),
            bases: record.states.iter().map(|s| s.basis()).collect(),
            receiver_outcomes,
            tp_states,
            errors,
        },
    })
}
