//! GHZ-correlation checks and raw key extraction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::position::SharedState;
use crate::bits::BitString;
use crate::error::{QkaError, Result};
use crate::qsim::Basis;

/// Tracks which positions have been spent on detection.
#[derive(Clone, Debug)]
pub struct PositionLedger {
    consumed: Vec<bool>,
}

impl PositionLedger {
    pub fn new(total: usize) -> Self {
        PositionLedger {
            consumed: vec![false; total],
        }
    }

    pub fn available(&self) -> Vec<usize> {
        (0..self.consumed.len()).filter(|&p| !self.consumed[p]).collect()
    }

    pub fn is_consumed(&self, position: usize) -> bool {
        self.consumed.get(position).copied().unwrap_or(false)
    }

    /// Marks `positions` as used. Fails without side effects if any is out of
    /// range, repeated, or already used.
    pub fn consume(&mut self, positions: &[usize]) -> Result<()> {
        for (i, &p) in positions.iter().enumerate() {
            if p >= self.consumed.len() {
                return Err(QkaError::invalid(format!("position {p} out of range")));
            }
            if self.consumed[p] || positions[..i].contains(&p) {
                return Err(QkaError::invalid(format!("position {p} already used for detection")));
            }
        }
        for &p in positions {
            self.consumed[p] = true;
        }
        Ok(())
    }
}

/// True when the outcomes violate the GHZ correlation for `basis`: unequal
/// bits in the computational basis, an odd number of `−` in the X basis.
pub fn violates_correlation(basis: Basis, outcomes: &[bool]) -> bool {
    match basis {
        Basis::Computational => outcomes.iter().any(|&b| b != outcomes[0]),
        Basis::X => outcomes.iter().filter(|&&b| b).count() % 2 == 1,
    }
}

/// Public record of one detection round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionDisclosure {
    /// 1-based.
    pub initiator: usize,
    pub positions: Vec<usize>,
    pub bases: Vec<Basis>,
    /// One entry per position; bit `i` is participant `i+1`'s outcome.
    pub outcomes: Vec<BitString>,
    pub errors: usize,
}

/// One detection round led by `initiator` (0-based) over `positions`.
///
/// For each position the initiator picks Z or X uniformly; every participant
/// measures its qubit in that basis and the outcomes are checked against the
/// GHZ correlation.
pub fn detection_round<R: Rng + ?Sized>(
    initiator: usize,
    states: &mut [SharedState],
    positions: &[usize],
    ledger: &mut PositionLedger,
    rng: &mut R,
) -> Result<DetectionDisclosure> {
    if positions.iter().any(|&p| p >= states.len()) {
        return Err(QkaError::invalid("detection position out of range"));
    }
    ledger.consume(positions)?;
    let mut bases = Vec::with_capacity(positions.len());
    let mut outcomes = Vec::with_capacity(positions.len());
    let mut errors = 0;
    for &p in positions {
        let basis = Basis::from_bit(rng.random_bool(0.5));
        let shared = &mut states[p];
        let bits = (0..shared.parties)
            .map(|i| {
                let q = shared.party_qubit(i);
                shared.state.measure_qubit(q, basis, rng)
            })
            .collect::<Result<Vec<bool>>>()?;
        if violates_correlation(basis, &bits) {
            errors += 1;
        }
        bases.push(basis);
        outcomes.push(BitString::new(bits));
    }
    Ok(DetectionDisclosure {
        initiator: initiator + 1,
        positions: positions.to_vec(),
        bases,
        outcomes,
        errors,
    })
}

/// Each participant measures its qubit at every key position in the
/// computational basis. Participants measure in `order`; keys are returned
/// indexed by participant.
pub fn extract_key<R: Rng + ?Sized>(
    states: &mut [SharedState],
    positions: &[usize],
    order: &[usize],
    rng: &mut R,
) -> Result<Vec<BitString>> {
    let parties = match states.first() {
        Some(s) => s.parties,
        None => return Ok(vec![BitString::default(); order.len()]),
    };
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..parties).collect::<Vec<_>>() {
        return Err(QkaError::invalid("measurement order must list every participant once"));
    }
    let mut keys = vec![BitString::default(); parties];
    for &p in positions {
        let shared = states
            .get_mut(p)
            .ok_or_else(|| QkaError::invalid(format!("key position {p} out of range")))?;
        for &i in order {
            let q = shared.party_qubit(i);
            let bit = shared.state.measure_qubit(q, Basis::Computational, rng)?;
            keys[i].push(bit);
        }
    }
    Ok(keys)
}
