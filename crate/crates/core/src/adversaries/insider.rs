//! Dishonest participants trying to fix a key bit by measuring first.

use rand::RngCore;

use super::{Adversary, AttackClaims, AttackSpec};
use crate::error::Result;
use crate::protocol::{run_protocol, ProtocolConfig, RunReport};

pub struct DishonestParticipants {
    parties: Vec<usize>,
    target_bit: bool,
    key_index: usize,
}

impl DishonestParticipants {
    /// `parties` are 0-based.
    pub fn new(parties: Vec<usize>, target_bit: bool, key_index: usize) -> Self {
        DishonestParticipants {
            parties,
            target_bit,
            key_index,
        }
    }
}

impl Adversary for DishonestParticipants {
    fn key_order(&self, parties: usize) -> Vec<usize> {
        let mut order = self.parties.clone();
        order.extend((0..parties).filter(|p| !self.parties.contains(p)));
        order
    }

    fn claims(&self) -> AttackClaims {
        AttackClaims::KeyBitTarget {
            parties: self.parties.clone(),
            target_bit: self.target_bit,
            key_index: self.key_index,
        }
    }
}

/// One run in which `party` (1-based) measures its key particles before
/// everyone else, hoping for `target_bit` at `key_index`.
pub fn dishonest_measure_early(
    party: usize,
    target_bit: u8,
    key_index: usize,
    config: &ProtocolConfig,
    rng: &mut dyn RngCore,
) -> Result<RunReport> {
    let spec = AttackSpec::DishonestParticipant {
        party,
        target_bit,
        key_index,
    };
    run_protocol(config, Some(&spec), rng)
}
