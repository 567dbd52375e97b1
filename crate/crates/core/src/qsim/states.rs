use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::gate::Gate;
use super::state::StateVector;
use crate::bits::BitString;
use crate::error::{QkaError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];
}

/// `|φ±⟩ = (|00⟩ ± |11⟩)/√2`, `|ψ±⟩ = (|01⟩ ± |10⟩)/√2`.
pub fn bell_pair(kind: BellKind) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let amps = match kind {
        BellKind::PhiPlus => [h, 0.0, 0.0, h],
        BellKind::PhiMinus => [h, 0.0, 0.0, -h],
        BellKind::PsiPlus => [0.0, h, h, 0.0],
        BellKind::PsiMinus => [0.0, h, -h, 0.0],
    };
    StateVector::from_raw(2, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
}

/// Label of an m-qubit GHZ basis state.
///
/// Bit 0 is the phase bit; bits 1.. are flip bits. The labeled state is
/// `(|0 b₂ … b_m⟩ + (−1)^a |1 b̄₂ … b̄_m⟩)/√2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GhzLabel(BitString);

impl GhzLabel {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.len() < 2 {
            return Err(QkaError::invalid(format!(
                "GHZ label needs at least 2 bits, got {}",
                bits.len()
            )));
        }
        Ok(GhzLabel(BitString::new(bits)))
    }

    pub fn zero(m: usize) -> Result<Self> {
        Self::new(vec![false; m])
    }

    /// Label whose bit string is the big-endian reading of `index`.
    pub fn from_index(index: usize, m: usize) -> Result<Self> {
        Self::new(BitString::from_index(index, m).bits().to_vec())
    }

    /// All `2^m` labels in index order.
    pub fn all(m: usize) -> Result<Vec<GhzLabel>> {
        (0..1usize << m).map(|i| Self::from_index(i, m)).collect()
    }

    pub fn index(&self) -> usize {
        self.0.to_index()
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    pub fn phase_bit(&self) -> bool {
        self.0.get(0)
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0.get(i)
    }

    pub fn bits(&self) -> &[bool] {
        self.0.bits()
    }

    pub fn is_zero(&self) -> bool {
        self.0.count_ones() == 0
    }

    /// Basis index of the `|0 b₂…⟩` branch.
    pub(crate) fn low_index(&self) -> usize {
        let m = self.parties();
        (1..m).fold(0, |acc, i| acc | (self.bit(i) as usize) << (m - 1 - i))
    }

    /// Basis index of the `|1 b̄₂…⟩` branch.
    pub(crate) fn high_index(&self) -> usize {
        let m = self.parties();
        (!self.low_index()) & ((1 << m) - 1)
    }

    /// Gate the i-th holder applies to map this label back to `0…0`:
    /// `Z^{u₁}` for the first, `X^{u_i}` for the rest.
    pub fn correction(&self, holder: usize) -> Gate {
        match (holder, self.bit(holder)) {
            (_, false) => Gate::I,
            (0, true) => Gate::Z,
            (_, true) => Gate::X,
        }
    }
}

impl fmt::Display for GhzLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for GhzLabel {
    type Err = QkaError;

    fn from_str(s: &str) -> Result<Self> {
        GhzLabel::new(s.parse::<BitString>()?.bits().to_vec())
    }
}

impl Serialize for GhzLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GhzLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The GHZ basis state named by `label`.
pub fn ghz_state(label: &GhzLabel) -> StateVector {
    let m = label.parties();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << m];
    let sign = if label.phase_bit() { -1.0 } else { 1.0 };
    amps[label.low_index()] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[label.high_index()] = Complex64::new(sign * FRAC_1_SQRT_2, 0.0);
    StateVector::from_raw(m, amps)
}

/// `|φ⁺⟩^{⊗m}` with layout `(T₁, P₁, …, T_m, P_m)`.
pub fn phi_plus_pairs(m: usize) -> Result<StateVector> {
    if m == 0 {
        return Err(QkaError::invalid("need at least one pair"));
    }
    let pair = bell_pair(BellKind::PhiPlus);
    (1..m).try_fold(pair.clone(), |acc, _| acc.tensor(&pair))
}
