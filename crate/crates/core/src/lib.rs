//! Simulator for authenticated multi-party quantum key agreement by
//! entanglement swapping, with adversary models, exact detection oracles,
//! and a Monte Carlo harness.

pub mod adversaries;
pub mod bits;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod protocol;
pub mod qsim;
pub mod rng;

pub use bits::BitString;
pub use error::{QkaError, Result};
