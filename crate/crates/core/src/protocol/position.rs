//! One entangled position from preparation to correction: I/H encoding,
//! TP's GHZ measurement, and the participants' corrections.

use rand::Rng;

use crate::error::{QkaError, Result};
use crate::qsim::{phi_plus_pairs, Gate, GhzLabel, StateVector};

/// Qubits of one position before TP's GHZ measurement.
///
/// Layout is `(T₁, P₁, …, T_m, P_m, extra…)`. Extra qubits belong to
/// whoever appended them (an ancilla kept by TP, a particle kept by an
/// interceptor) and are never touched by honest roles.
#[derive(Clone, Debug)]
pub struct PositionState {
    pub state: StateVector,
    pub parties: usize,
}

impl PositionState {
    pub fn new(state: StateVector, parties: usize) -> Result<Self> {
        if state.num_qubits() < 2 * parties {
            return Err(QkaError::invalid(format!(
                "{}-qubit state cannot hold {parties} pairs",
                state.num_qubits()
            )));
        }
        Ok(PositionState { state, parties })
    }

    pub fn tp_qubit(&self, party: usize) -> usize {
        2 * party
    }

    pub fn party_qubit(&self, party: usize) -> usize {
        2 * party + 1
    }

    pub fn extras(&self) -> usize {
        self.state.num_qubits() - 2 * self.parties
    }

    pub fn tp_qubits(&self) -> Vec<usize> {
        (0..self.parties).map(|i| self.tp_qubit(i)).collect()
    }

    /// Moves the particle on `qubit` into a new trailing extra qubit and
    /// puts `replacement` (one qubit) in its place. Returns the extra index.
    pub fn substitute(&mut self, qubit: usize, replacement: &StateVector) -> Result<usize> {
        if replacement.num_qubits() != 1 {
            return Err(QkaError::invalid("replacement must be a single qubit"));
        }
        self.state.check_qubit(qubit)?;
        let extra = self.extras();
        self.state = self.state.tensor(replacement)?;
        let last = self.state.num_qubits() - 1;
        self.state.swap_qubits(qubit, last)?;
        Ok(extra)
    }
}

/// Qubits of one position after the swap: `(P₁, …, P_m, extra…)`.
#[derive(Clone, Debug)]
pub struct SharedState {
    pub state: StateVector,
    pub parties: usize,
}

impl SharedState {
    pub fn party_qubit(&self, party: usize) -> usize {
        party
    }

    pub fn extra_qubit(&self, extra: usize) -> usize {
        self.parties + extra
    }

    pub fn extras(&self) -> usize {
        self.state.num_qubits() - self.parties
    }

    pub fn party_qubits(&self) -> Vec<usize> {
        (0..self.parties).collect()
    }
}

/// TP's honest preparation: `m` copies of `|φ⁺⟩`.
pub fn tp_prepare_position(parties: usize) -> Result<StateVector> {
    if parties < 2 {
        return Err(QkaError::invalid("at least two participants required"));
    }
    phi_plus_pairs(parties)
}

/// Encoding: TP applies `H^{tp_bits[i]}` on `T_i`, participant `i` applies
/// `H^{party_bits[i]}` on `P_i`.
pub fn apply_auth_encoding(
    position: &mut PositionState,
    tp_bits: &[bool],
    party_bits: &[bool],
) -> Result<()> {
    if tp_bits.len() != position.parties || party_bits.len() != position.parties {
        return Err(QkaError::invalid(format!(
            "expected {} encoding bits per side",
            position.parties
        )));
    }
    for i in 0..position.parties {
        let (t, p) = (position.tp_qubit(i), position.party_qubit(i));
        position.state.apply_if(tp_bits[i], Gate::H, t)?;
        position.state.apply_if(party_bits[i], Gate::H, p)?;
    }
    Ok(())
}

/// Swap: GHZ-basis measurement of TP's qubits. Returns the outcome label
/// and the state left with the participants (and any extras).
pub fn tp_swap<R: Rng + ?Sized>(
    position: &PositionState,
    rng: &mut R,
) -> Result<(GhzLabel, SharedState)> {
    let record = position.state.measure_ghz_basis(&position.tp_qubits(), rng)?;
    let label = record.label().clone();
    let residual = record
        .residual
        .expect("participants' qubits remain after TP's measurement");
    Ok((
        label,
        SharedState {
            state: residual,
            parties: position.parties,
        },
    ))
}

/// Corrections with per-party gates, `None` meaning the honest correction for
/// `announced`.
pub fn apply_corrections(
    shared: &mut SharedState,
    announced: &GhzLabel,
    overrides: &[Option<Gate>],
) -> Result<()> {
    if announced.parties() != shared.parties {
        return Err(QkaError::invalid("label width differs from party count"));
    }
    for i in 0..shared.parties {
        let gate = overrides
            .get(i)
            .copied()
            .flatten()
            .unwrap_or_else(|| announced.correction(i));
        shared.state.apply_gate(gate, shared.party_qubit(i))?;
    }
    Ok(())
}

/// Swap and corrections with every role honest.
pub fn swap_and_correct<R: Rng + ?Sized>(
    position: &PositionState,
    rng: &mut R,
) -> Result<(GhzLabel, SharedState)> {
    let (label, mut shared) = tp_swap(position, rng)?;
    apply_corrections(&mut shared, &label, &[])?;
    Ok((label, shared))
}
