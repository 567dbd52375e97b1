//! Projective measurements.
//!
//! Every measurement is available in two forms: an exhaustive list of
//! outcome branches with exact Born probabilities, and a sampled form that
//! draws one branch from a caller-supplied random stream.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gate::{Basis, Gate};
use super::state::StateVector;
use super::states::{ghz_state, GhzLabel};
use crate::bits::BitString;
use crate::error::{QkaError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasuredIn {
    Computational,
    XBasis,
    GhzBasis,
}

impl From<Basis> for MeasuredIn {
    fn from(b: Basis) -> Self {
        match b {
            Basis::Computational => MeasuredIn::Computational,
            Basis::X => MeasuredIn::XBasis,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Bits(BitString),
    Ghz(GhzLabel),
}

#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub measured_qubits: Vec<usize>,
    pub basis: MeasuredIn,
    pub outcome: Outcome,
    pub probability: f64,
    pub post_state: StateVector,
    /// State of the unmeasured qubits (ascending order). `None` when every
    /// qubit was measured.
    pub residual: Option<StateVector>,
}

impl MeasurementRecord {
    /// Outcome bits; panics on a GHZ record.
    pub fn bits(&self) -> &BitString {
        match &self.outcome {
            Outcome::Bits(b) => b,
            Outcome::Ghz(_) => panic!("GHZ record has no bit outcome"),
        }
    }

    pub fn label(&self) -> &GhzLabel {
        match &self.outcome {
            Outcome::Ghz(l) => l,
            Outcome::Bits(_) => panic!("bit record has no GHZ label"),
        }
    }
}

/// One outcome of a single-qubit-basis measurement.
#[derive(Clone, Debug)]
pub struct BitBranch {
    pub outcome: BitString,
    pub probability: f64,
    pub post_state: StateVector,
}

/// One outcome of a GHZ-basis measurement.
#[derive(Clone, Debug)]
pub struct GhzBranch {
    pub label: GhzLabel,
    pub probability: f64,
    /// Normalized state of the unmeasured qubits.
    pub residual: Option<StateVector>,
}

fn pick<T, R: Rng + ?Sized>(items: &[T], weight: impl Fn(&T) -> f64, rng: &mut R) -> usize {
    let total: f64 = items.iter().map(&weight).sum();
    let mut u = rng.random::<f64>() * total;
    for (i, item) in items.iter().enumerate() {
        let w = weight(item);
        if u < w {
            return i;
        }
        u -= w;
    }
    // Rounding can leave u marginally above the last cumulative bound.
    items
        .iter()
        .rposition(|it| weight(it) > 0.0)
        .expect("at least one branch has positive weight")
}

impl StateVector {
    /// Marginal distribution of `qubits` in `basis`, big-endian over the
    /// listed order.
    pub fn outcome_probabilities(&self, qubits: &[usize], basis: Basis) -> Result<Vec<f64>> {
        self.check_distinct(qubits)?;
        let rotated;
        let state = match basis {
            Basis::Computational => self,
            Basis::X => {
                let mut s = self.clone();
                for &q in qubits {
                    s.apply_gate(Gate::H, q)?;
                }
                rotated = s;
                &rotated
            }
        };
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, (sub, _)) in state.split_indices(qubits).into_iter().enumerate() {
            probs[sub] += state.amplitude(i).norm_sqr();
        }
        Ok(probs)
    }

    /// All outcomes with nonzero probability of measuring `qubits` in
    /// `basis`, with exact probabilities and collapsed states.
    pub fn basis_branches(&self, qubits: &[usize], basis: Basis) -> Result<Vec<BitBranch>> {
        self.check_distinct(qubits)?;
        if qubits.is_empty() {
            return Err(QkaError::invalid("no qubits to measure"));
        }
        let mut state = self.clone();
        if basis == Basis::X {
            for &q in qubits {
                state.apply_gate(Gate::H, q)?;
            }
        }
        let split = state.split_indices(qubits);
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, (sub, _)) in split.iter().enumerate() {
            probs[*sub] += state.amplitude(i).norm_sqr();
        }
        let mut branches = Vec::new();
        for (sub, &p) in probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            let scale = 1.0 / p.sqrt();
            let amps = split
                .iter()
                .enumerate()
                .map(|(i, (s, _))| {
                    if *s == sub {
                        state.amplitude(i) * scale
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            let mut post = StateVector::from_raw(state.num_qubits(), amps);
            if basis == Basis::X {
                for &q in qubits {
                    post.apply_gate(Gate::H, q)?;
                }
            }
            branches.push(BitBranch {
                outcome: BitString::from_index(sub, qubits.len()),
                probability: p,
                post_state: post,
            });
        }
        Ok(branches)
    }

    /// Samples a measurement of `qubits` in `basis`. Outcome bit 0 ↔ `|0⟩`
    /// or `|+⟩`, 1 ↔ `|1⟩` or `|−⟩`.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        basis: Basis,
        rng: &mut R,
    ) -> Result<MeasurementRecord> {
        let mut branches = self.basis_branches(qubits, basis)?;
        let chosen = branches.swap_remove(pick(&branches, |b| b.probability, rng));
        Ok(MeasurementRecord {
            measured_qubits: qubits.to_vec(),
            basis: basis.into(),
            outcome: Outcome::Bits(chosen.outcome),
            probability: chosen.probability,
            post_state: chosen.post_state,
            residual: None,
        })
    }

    /// Measures one qubit in place and returns the outcome bit.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, qubit: usize, basis: Basis, rng: &mut R) -> Result<bool> {
        let record = self.measure(&[qubit], basis, rng)?;
        let bit = record.bits().get(0);
        *self = record.post_state;
        Ok(bit)
    }

    /// Unnormalized `(⟨label| ⊗ I) |ψ⟩` over the unmeasured qubits.
    fn ghz_contract(&self, label: &GhzLabel, split: &[(usize, usize)], rest_dim: usize) -> Vec<Complex64> {
        let (lo, hi) = (label.low_index(), label.high_index());
        let sign = if label.phase_bit() { -1.0 } else { 1.0 };
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = vec![Complex64::new(0.0, 0.0); rest_dim];
        for (i, &(sub, rest)) in split.iter().enumerate() {
            if sub == lo {
                out[rest] += self.amplitude(i) * h;
            } else if sub == hi {
                out[rest] += self.amplitude(i) * (sign * h);
            }
        }
        out
    }

    /// Projects `qubits` onto `target` (a state over exactly those qubits).
    /// Returns the probability and the normalized state left on the other
    /// qubits, if any remain and the probability is nonzero.
    pub fn project_onto(&self, qubits: &[usize], target: &StateVector) -> Result<(f64, Option<StateVector>)> {
        self.check_distinct(qubits)?;
        if target.num_qubits() != qubits.len() {
            return Err(QkaError::invalid("projector width differs from qubit count"));
        }
        let rest_qubits = self.num_qubits() - qubits.len();
        let mut out = vec![Complex64::new(0.0, 0.0); 1 << rest_qubits];
        for (i, (sub, rest)) in self.split_indices(qubits).into_iter().enumerate() {
            out[rest] += target.amplitude(sub).conj() * self.amplitude(i);
        }
        let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        let residual = (rest_qubits > 0 && p > 0.0).then(|| {
            let scale = 1.0 / p.sqrt();
            StateVector::from_raw(rest_qubits, out.into_iter().map(|a| a * scale).collect())
        });
        Ok((p, residual))
    }

    /// All GHZ-basis outcomes with nonzero probability on `qubits`, with the
    /// normalized state left on the remaining qubits.
    pub fn ghz_branches(&self, qubits: &[usize]) -> Result<Vec<GhzBranch>> {
        self.check_distinct(qubits)?;
        let m = qubits.len();
        if m < 2 {
            return Err(QkaError::invalid("GHZ measurement needs at least 2 qubits"));
        }
        let rest_qubits = self.num_qubits() - m;
        let split = self.split_indices(qubits);
        let mut branches = Vec::new();
        for label in GhzLabel::all(m)? {
            let projected = self.ghz_contract(&label, &split, 1 << rest_qubits);
            let p: f64 = projected.iter().map(|a| a.norm_sqr()).sum();
            if p <= 0.0 {
                continue;
            }
            let residual = (rest_qubits > 0).then(|| {
                let scale = 1.0 / p.sqrt();
                StateVector::from_raw(rest_qubits, projected.into_iter().map(|a| a * scale).collect())
            });
            branches.push(GhzBranch {
                label,
                probability: p,
                residual,
            });
        }
        Ok(branches)
    }

    /// Samples a projective measurement of `qubits` onto the GHZ basis.
    pub fn measure_ghz_basis<R: Rng + ?Sized>(&self, qubits: &[usize], rng: &mut R) -> Result<MeasurementRecord> {
        let mut branches = self.ghz_branches(qubits)?;
        let chosen = branches.swap_remove(pick(&branches, |b| b.probability, rng));
        let post_state = embed(self.num_qubits(), qubits, &ghz_state(&chosen.label), chosen.residual.as_ref());
        Ok(MeasurementRecord {
            measured_qubits: qubits.to_vec(),
            basis: MeasuredIn::GhzBasis,
            outcome: Outcome::Ghz(chosen.label),
            probability: chosen.probability,
            post_state,
            residual: chosen.residual,
        })
    }
}

/// Places `sub` on `qubits` and `rest` on the remaining qubits of an
/// `n`-qubit register.
fn embed(n: usize, qubits: &[usize], sub: &StateVector, rest: Option<&StateVector>) -> StateVector {
    let shell = StateVector::from_raw(n, vec![Complex64::new(0.0, 0.0); 1 << n]);
    let amps = shell
        .split_indices(qubits)
        .into_iter()
        .map(|(s, r)| sub.amplitude(s) * rest.map_or(Complex64::new(1.0, 0.0), |st| st.amplitude(r)))
        .collect();
    StateVector::from_raw(n, amps)
}
