//! The m-party key agreement protocol, step by step.

mod auth;
mod config;
mod decoy;
mod detection;
mod position;
mod run;
mod transcript;

pub use auth::{derive_auth_tag, random_nonce, AuthTag, PartyIdentity, HASH_FUNCTION_ID};
pub use config::{ProtocolConfig, MAX_PARTIES};
pub use decoy::{
    check_decoys, transmit_with_decoys, DecoyCheck, DecoyDisclosure, DecoyRecord, DecoyState, DisclosedOutcome,
    DisclosedState,
};
pub use detection::{detection_round, extract_key, violates_correlation, DetectionDisclosure, PositionLedger};
pub use position::{
    apply_auth_encoding, apply_corrections, swap_and_correct, tp_prepare_position, tp_swap, PositionState, SharedState,
};
pub use run::{run_protocol, run_with_adversary};
pub use transcript::{AbortReason, RunReport, Transcript};
