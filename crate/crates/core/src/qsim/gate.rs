use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Single-qubit operators used by the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    I,
    X,
    Z,
    /// `iY = |0⟩⟨1| − |1⟩⟨0|`; squares to `−I`.
    IY,
    H,
}

impl Gate {
    pub const ALL: [Gate; 5] = [Gate::I, Gate::X, Gate::Z, Gate::IY, Gate::H];

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let r = |x: f64| Complex64::new(x, 0.0);
        match self {
            Gate::I => [[r(1.0), r(0.0)], [r(0.0), r(1.0)]],
            Gate::X => [[r(0.0), r(1.0)], [r(1.0), r(0.0)]],
            Gate::Z => [[r(1.0), r(0.0)], [r(0.0), r(-1.0)]],
            Gate::IY => [[r(0.0), r(1.0)], [r(-1.0), r(0.0)]],
            Gate::H => [
                [r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)],
                [r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)],
            ],
        }
    }

    /// Scalar `s` with `G·G = s·I`.
    pub fn square_phase(self) -> f64 {
        match self {
            Gate::IY => -1.0,
            _ => 1.0,
        }
    }
}

/// Single-qubit measurement bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `{|0⟩, |1⟩}`
    Computational,
    /// `{|+⟩, |−⟩}`, outcome bit 1 ↔ `|−⟩`
    X,
}

impl Basis {
    pub const BOTH: [Basis; 2] = [Basis::Computational, Basis::X];

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Basis::X
        } else {
            Basis::Computational
        }
    }
}
