use serde::{Deserialize, Serialize};

use super::decoy::DecoyDisclosure;
use super::detection::DetectionDisclosure;
use crate::adversaries::AttackOutcome;
use crate::bits::BitString;
use crate::qsim::GhzLabel;

/// Why a run stopped early.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum AbortReason {
    FirstDetection {
        channel: usize,
        errors: usize,
        checked: usize,
    },
    SecondDetection {
        initiator: usize,
        errors: usize,
        checked: usize,
    },
}

/// Everything announced over the public channel during one run.
///
/// Holds only public values: identities, the random numbers, the hash
/// identifier, decoy disclosures, GHZ announcements, and detection
/// disclosures. Private keys and auth tags never enter it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub public_ids: Vec<String>,
    /// Hex.
    pub r_tp: String,
    /// Hex, one per participant.
    pub r_parties: Vec<String>,
    pub hash_function: String,
    pub decoy_disclosures: Vec<DecoyDisclosure>,
    pub ghz_announcements: Vec<GhzLabel>,
    pub detection_disclosures: Vec<DetectionDisclosure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort_reason: Option<AbortReason>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub passed: bool,
    /// Per-participant raw keys; absent when the run aborted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keys: Option<Vec<BitString>>,
    pub first_detection_errors: usize,
    pub second_detection_errors: usize,
    pub transcript: Transcript,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackOutcome>,
}

impl RunReport {
    /// True when the run passed and every participant holds the same key.
    pub fn keys_agree(&self) -> bool {
        match &self.keys {
            Some(keys) => keys.windows(2).all(|w| w[0] == w[1]),
            None => false,
        }
    }
}
