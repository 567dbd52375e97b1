//! Attacks on the TP-to-participant quantum channels.

use rand::{Rng, RngCore};

use super::{Adversary, AttackClaims, AttackSpec, ChannelScope, InFlight};
use crate::bits::BitString;
use crate::error::Result;
use crate::protocol::{run_protocol, violates_correlation, DecoyState, ProtocolConfig, RunReport, SharedState};
use crate::qsim::{Basis, GhzLabel};

/// What Eve learned from one intercepted particle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EveRecord {
    pub basis: Basis,
    pub outcome: bool,
}

/// Measures the particle in a uniformly random basis. The particle travels
/// on in the eigenstate Eve observed, which is exactly what she would resend.
pub fn eve_intercept_resend(particle: &mut InFlight<'_>, rng: &mut dyn RngCore) -> Result<EveRecord> {
    let basis = Basis::from_bit(rng.random_bool(0.5));
    let outcome = particle.measure(basis, rng)?;
    Ok(EveRecord { basis, outcome })
}

pub struct ExternalInterceptResend {
    target: usize,
    probability: f64,
    attack_signals: bool,
    records: Vec<EveRecord>,
}

impl ExternalInterceptResend {
    pub fn new(target: usize, probability: f64, attack_signals: bool) -> Self {
        ExternalInterceptResend {
            target,
            probability,
            attack_signals,
            records: Vec::new(),
        }
    }

    pub fn records(&self) -> &[EveRecord] {
        &self.records
    }
}

impl Adversary for ExternalInterceptResend {
    fn channel_scope(&self, channel: usize) -> Option<ChannelScope> {
        (channel == self.target).then_some(if self.attack_signals {
            ChannelScope::All
        } else {
            ChannelScope::DecoysOnly
        })
    }

    fn on_particle(&mut self, _channel: usize, _slot: usize, mut particle: InFlight<'_>, rng: &mut dyn RngCore) -> Result<()> {
        if rng.random_bool(self.probability) {
            self.records.push(eve_intercept_resend(&mut particle, rng)?);
        }
        Ok(())
    }

    fn claims(&self) -> AttackClaims {
        AttackClaims::Intercepted {
            count: self.records.len(),
        }
    }
}

/// Eve swaps every particle on the target channel for a random BB84 fake,
/// keeps the originals, follows the announced corrections on them, and
/// compares her own outcome with the disclosed ones at detection positions.
pub struct HashLeakInterceptResend {
    target: usize,
    second_detection_only: bool,
    inferred: Vec<(usize, bool)>,
}

impl HashLeakInterceptResend {
    pub fn new(target: usize, second_detection_only: bool) -> Self {
        HashLeakInterceptResend {
            target,
            second_detection_only,
            inferred: Vec::new(),
        }
    }
}

impl Adversary for HashLeakInterceptResend {
    fn channel_scope(&self, channel: usize) -> Option<ChannelScope> {
        (channel == self.target).then_some(ChannelScope::All)
    }

    fn on_particle(&mut self, _channel: usize, _slot: usize, mut particle: InFlight<'_>, rng: &mut dyn RngCore) -> Result<()> {
        particle.substitute(&DecoyState::random(rng).prepare())
    }

    fn first_detection_enabled(&self) -> bool {
        !self.second_detection_only
    }

    fn after_corrections(
        &mut self,
        _position: usize,
        announced: &GhzLabel,
        shared: &mut SharedState,
        _rng: &mut dyn RngCore,
    ) -> Result<()> {
        if shared.extras() > 0 {
            let q = shared.extra_qubit(0);
            shared.state.apply_gate(announced.correction(self.target), q)?;
        }
        Ok(())
    }

    fn observe_detection(
        &mut self,
        position: usize,
        basis: Basis,
        outcomes: &BitString,
        shared: &mut SharedState,
        rng: &mut dyn RngCore,
    ) -> Result<()> {
        if shared.extras() == 0 {
            return Ok(());
        }
        let q = shared.extra_qubit(0);
        let mine = shared.state.measure_qubit(q, basis, rng)?;
        let mut bits = outcomes.bits().to_vec();
        bits[self.target] = mine;
        // A consistent pattern means TP's H was matched on her qubit: t = 0.
        self.inferred.push((position, violates_correlation(basis, &bits)));
        Ok(())
    }

    fn claims(&self) -> AttackClaims {
        AttackClaims::InferredTagBits {
            party: self.target,
            bits: self.inferred.clone(),
        }
    }
}

/// One run under the hash-leak attack on `target` (1-based).
pub fn hash_leak_attack(
    target: usize,
    second_detection_only: bool,
    config: &ProtocolConfig,
    rng: &mut dyn RngCore,
) -> Result<RunReport> {
    let spec = AttackSpec::HashLeakInterceptResend {
        target,
        second_detection_only,
    };
    run_protocol(config, Some(&spec), rng)
}
