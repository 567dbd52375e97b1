use std::fmt;

use num_complex::Complex64;

use super::gate::Gate;
use crate::error::{QkaError, Result};

/// Normalization tolerance for states built from caller-supplied amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest register we are willing to allocate.
pub const MAX_QUBITS: usize = 24;

/// Dense pure state over `num_qubits` qubits.
///
/// Qubit 0 is the leftmost symbol of the ket, so the amplitude index is the
/// big-endian reading of the bit string: `|q0 q1 … q(n-1)⟩` lives at
/// `Σ q_k · 2^(n-1-k)`.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from explicit amplitudes. The length must be a power of
    /// two (at least 2) and the vector must be normalized within
    /// [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QkaError::invalid(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(QkaError::invalid(format!(
                "{num_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit"
            )));
        }
        let state = StateVector {
            num_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QkaError::invalid(format!(
                "state is not normalized (norm² = {norm})"
            )));
        }
        Ok(state)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales to unit
    /// norm instead of rejecting. Fails only on the zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(QkaError::invalid("cannot normalize the zero vector"));
        }
        Self::from_amplitudes(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub(crate) fn from_raw(num_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << num_qubits);
        StateVector {
            num_qubits,
            amplitudes,
        }
    }

    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(QkaError::invalid(format!(
                "qubit count {num_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector::from_raw(num_qubits, amplitudes))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit of `qubit` inside basis index `index`.
    #[inline]
    pub fn bit_of(&self, index: usize, qubit: usize) -> bool {
        (index >> (self.num_qubits - 1 - qubit)) & 1 == 1
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(QkaError::invalid(format!(
                "qubit {qubit} out of range for a {}-qubit state",
                self.num_qubits
            )));
        }
        Ok(())
    }

    pub(crate) fn check_distinct(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(QkaError::invalid(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }

    /// Applies a single-qubit gate in place.
    pub fn apply_gate(&mut self, gate: Gate, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        if gate == Gate::I {
            return Ok(());
        }
        let [[m00, m01], [m10, m11]] = gate.matrix();
        let stride = 1usize << (self.num_qubits - 1 - qubit);
        for base in (0..self.dim()).step_by(stride << 1) {
            for i in base..base + stride {
                let j = i + stride;
                let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
                self.amplitudes[i] = m00 * a + m01 * b;
                self.amplitudes[j] = m10 * a + m11 * b;
            }
        }
        Ok(())
    }

    /// Consuming form of [`apply_gate`](Self::apply_gate).
    pub fn with_gate(mut self, gate: Gate, qubit: usize) -> Result<Self> {
        self.apply_gate(gate, qubit)?;
        Ok(self)
    }

    /// Applies `gate` to `qubit` when `enabled`, identity otherwise.
    pub fn apply_if(&mut self, enabled: bool, gate: Gate, qubit: usize) -> Result<()> {
        if enabled {
            self.apply_gate(gate, qubit)
        } else {
            self.check_qubit(qubit)
        }
    }

    /// `self ⊗ other`; `other`'s qubits are appended after ours.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let num_qubits = self.num_qubits + other.num_qubits;
        if num_qubits > MAX_QUBITS {
            return Err(QkaError::invalid(format!(
                "tensor product of {num_qubits} qubits exceeds the limit"
            )));
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector::from_raw(num_qubits, amplitudes))
    }

    /// Hermitian inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(QkaError::invalid(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|`, which is 1 exactly when the two rays coincide.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    pub fn equals_up_to_phase(&self, other: &StateVector, tolerance: f64) -> bool {
        self.fidelity(other)
            .map(|f| (f - 1.0).abs() <= tolerance)
            .unwrap_or(false)
    }

    /// Exchanges two qubits (relabels tensor factors).
    pub fn swap_qubits(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Ok(());
        }
        let (ma, mb) = (
            1usize << (self.num_qubits - 1 - a),
            1usize << (self.num_qubits - 1 - b),
        );
        for i in 0..self.dim() {
            if i & ma != 0 && i & mb == 0 {
                let j = (i & !ma) | mb;
                self.amplitudes.swap(i, j);
            }
        }
        Ok(())
    }

    /// Reorders tensor factors: qubit `j` of the result is qubit `order[j]`
    /// of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<StateVector> {
        if order.len() != self.num_qubits {
            return Err(QkaError::invalid("permutation length differs from qubit count"));
        }
        self.check_distinct(order)?;
        let n = self.num_qubits;
        let amplitudes = (0..self.dim())
            .map(|new| {
                let old = order.iter().enumerate().fold(0, |acc, (j, &q)| {
                    acc | ((new >> (n - 1 - j)) & 1) << (n - 1 - q)
                });
                self.amplitudes[old]
            })
            .collect();
        Ok(StateVector::from_raw(n, amplitudes))
    }

    /// Splits every basis index into (index over `selected`, index over the
    /// remaining qubits in ascending order). Both sub-indices are big-endian.
    pub(crate) fn split_indices(&self, selected: &[usize]) -> Vec<(usize, usize)> {
        let rest: Vec<usize> = (0..self.num_qubits)
            .filter(|q| !selected.contains(q))
            .collect();
        (0..self.dim())
            .map(|i| {
                let sub = selected
                    .iter()
                    .fold(0, |acc, &q| (acc << 1) | self.bit_of(i, q) as usize);
                let rem = rest
                    .iter()
                    .fold(0, |acc, &q| (acc << 1) | self.bit_of(i, q) as usize);
                (sub, rem)
            })
            .collect()
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector[{}q]", self.num_qubits)?;
        let mut list = f.debug_map();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() > 1e-24 {
                list.entry(
                    &format!("|{:0width$b}⟩", i, width = self.num_qubits),
                    &format_args!("{:.6}{:+.6}i", a.re, a.im),
                );
            }
        }
        list.finish()
    }
}

/// `a ⊗ b`.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    a.tensor(b)
}

/// `⟨a|b⟩`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.inner(b)
}

/// Computational basis state; `bits[0]` is the leftmost ket symbol.
pub fn make_basis_state(num_qubits: usize, bits: &[bool]) -> Result<StateVector> {
    if bits.len() != num_qubits {
        return Err(QkaError::invalid(format!(
            "{} bits supplied for a {num_qubits}-qubit state",
            bits.len()
        )));
    }
    let mut state = StateVector::zero(num_qubits)?;
    let index = bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize);
    state.amplitudes.swap(0, index);
    Ok(state)
}
