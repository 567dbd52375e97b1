//! An outsider playing one participant without its private key.

use rand::{Rng, RngCore};

use super::{Adversary, AttackClaims, AttackSpec};
use crate::error::Result;
use crate::protocol::{run_protocol, ProtocolConfig, RunReport};
use crate::qsim::{Gate, GhzLabel};

pub struct Impersonation {
    target: usize,
    random_correction: bool,
    guesses: Vec<(usize, bool)>,
}

impl Impersonation {
    /// `target` is 0-based.
    pub fn new(target: usize, random_correction: bool) -> Self {
        Impersonation {
            target,
            random_correction,
            guesses: Vec::new(),
        }
    }
}

impl Adversary for Impersonation {
    fn impersonates(&self, party: usize) -> bool {
        party == self.target
    }

    fn encoding_bit(&mut self, _party: usize, position: usize, rng: &mut dyn RngCore) -> bool {
        let guess = rng.random_bool(0.5);
        self.guesses.push((position, guess));
        guess
    }

    fn correction(&mut self, _party: usize, _announced: &GhzLabel, rng: &mut dyn RngCore) -> Option<Gate> {
        self.random_correction
            .then(|| if rng.random_bool(0.5) { Gate::X } else { Gate::I })
    }

    fn claims(&self) -> AttackClaims {
        AttackClaims::EncodingGuesses {
            party: self.target,
            guesses: self.guesses.clone(),
        }
    }
}

/// One run with `target` (1-based) impersonated.
pub fn impersonation_attack(
    target: usize,
    random_correction: bool,
    config: &ProtocolConfig,
    rng: &mut dyn RngCore,
) -> Result<RunReport> {
    let spec = AttackSpec::Impersonation {
        target,
        random_correction,
    };
    run_protocol(config, Some(&spec), rng)
}
