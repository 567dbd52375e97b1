//! Dense state-vector simulation: preparation, single-qubit gates, and
//! projective measurement in the computational, X, and GHZ bases.

mod gate;
mod measure;
mod state;
mod states;

pub use gate::{Basis, Gate};
pub use measure::{BitBranch, GhzBranch, MeasuredIn, MeasurementRecord, Outcome};
pub use state::{inner_product, make_basis_state, tensor, StateVector, MAX_QUBITS, NORM_TOLERANCE};
pub use states::{bell_pair, ghz_state, phi_plus_pairs, BellKind, GhzLabel};
