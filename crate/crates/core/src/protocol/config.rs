use serde::{Deserialize, Serialize};

use crate::error::{QkaError, Result};

pub const MAX_PARTIES: usize = 6;

/// Parameters of one protocol session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Number of participants `m`.
    pub parties: usize,
    /// Raw key length `n` in bits.
    pub key_len: usize,
    /// Detection particles drawn by each participant.
    pub delta: usize,
    /// Decoy particles inserted per channel.
    pub zeta: usize,
    /// Largest tolerated error fraction per check; any higher rate aborts.
    #[serde(default)]
    pub error_threshold: f64,
}

impl ProtocolConfig {
    pub fn new(parties: usize, key_len: usize, delta: usize, zeta: usize) -> Result<Self> {
        let config = ProtocolConfig {
            parties,
            key_len,
            delta,
            zeta,
            error_threshold: 0.0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        self.error_threshold = threshold;
        self.validate()?;
        Ok(self)
    }

    /// `L = n + m·δ`, the number of entangled positions TP prepares.
    pub fn total_positions(&self) -> usize {
        self.key_len + self.parties * self.delta
    }

    pub fn validate(&self) -> Result<()> {
        if self.parties < 2 {
            return Err(QkaError::field("parties", "at least 2 participants required"));
        }
        // Every position holds 2m qubits until TP's GHZ measurement.
        if self.parties > MAX_PARTIES {
            return Err(QkaError::field(
                "parties",
                format!("at most {MAX_PARTIES} participants supported"),
            ));
        }
        if self.key_len == 0 {
            return Err(QkaError::field("key_len", "must be positive"));
        }
        if self.delta == 0 {
            return Err(QkaError::field("delta", "must be positive"));
        }
        if self.zeta == 0 {
            return Err(QkaError::field("zeta", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.error_threshold) {
            return Err(QkaError::field("error_threshold", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// True when `errors` out of `checked` exceeds the threshold.
    pub fn exceeds_threshold(&self, errors: usize, checked: usize) -> bool {
        checked > 0 && errors as f64 / checked as f64 > self.error_threshold
    }
}
