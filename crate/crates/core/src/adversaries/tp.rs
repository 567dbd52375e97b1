//! Attacks by a dishonest TP: product states and ancilla entanglement.
//!
//! TP knows every participant's tag, so both attacks pre-apply `H^{t_i}` to
//! `T_i` and `P_i`; after the I/H encoding the prepared state is back in
//! place. TP then announces the all-zero label so nobody applies a
//! correction.

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde::Serialize;

use super::{Adversary, AttackClaims, AttackSpec, TpView};
use crate::bits::BitString;
use crate::error::{QkaError, Result};
use crate::protocol::{
    apply_auth_encoding, apply_corrections, run_protocol, tp_swap, violates_correlation, AuthTag, PositionState,
    ProtocolConfig, RunReport, SharedState,
};
use crate::qsim::{make_basis_state, Basis, Gate, GhzLabel, StateVector};

/// The ancilla states TP entangles with the `|0…0⟩` and `|1…1⟩` branches.
#[derive(Clone, Debug, PartialEq)]
pub struct AncillaPair {
    pub theta0: StateVector,
    pub theta1: StateVector,
}

impl AncillaPair {
    pub fn new(theta0: StateVector, theta1: StateVector) -> Result<Self> {
        if theta0.num_qubits() != theta1.num_qubits() {
            return Err(QkaError::invalid("ancilla states differ in qubit count"));
        }
        Ok(AncillaPair { theta0, theta1 })
    }

    /// One-qubit ancillas with real overlap `r`: `θ₀ = |0⟩`,
    /// `θ₁ = r|0⟩ + √(1−r²)|1⟩`.
    pub fn with_overlap(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(QkaError::invalid(format!("overlap {r} outside [0, 1]")));
        }
        let theta0 = StateVector::zero(1)?;
        let theta1 = StateVector::from_amplitudes(vec![
            Complex64::new(r, 0.0),
            Complex64::new((1.0 - r * r).max(0.0).sqrt(), 0.0),
        ])?;
        AncillaPair::new(theta0, theta1)
    }

    pub fn qubits(&self) -> usize {
        self.theta0.num_qubits()
    }

    /// `⟨θ₀|θ₁⟩`.
    pub fn overlap(&self) -> Complex64 {
        self.theta0.inner(&self.theta1).expect("same width")
    }
}

/// Optimal two-outcome measurement `(w₀, w₁)` for telling `a` from `b`
/// with equal priors. `None` when the states coincide up to phase.
pub fn helstrom_basis(a: &StateVector, b: &StateVector) -> Result<Option<(StateVector, StateVector)>> {
    let c = a.inner(b)?;
    if c.norm() > 1.0 - 1e-12 {
        return Ok(None);
    }
    let phase = if c.norm() > 0.0 { c.conj() / c.norm() } else { Complex64::new(1.0, 0.0) };
    let b: Vec<Complex64> = b.amplitudes().iter().map(|x| x * phase).collect();
    let sum: Vec<Complex64> = a.amplitudes().iter().zip(&b).map(|(x, y)| x + y).collect();
    let diff: Vec<Complex64> = a.amplitudes().iter().zip(&b).map(|(x, y)| x - y).collect();
    let u = StateVector::normalized(sum)?;
    let v = StateVector::normalized(diff)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let w0 = u.amplitudes().iter().zip(v.amplitudes()).map(|(x, y)| (x + y) * h).collect();
    let w1 = u.amplitudes().iter().zip(v.amplitudes()).map(|(x, y)| (x - y) * h).collect();
    Ok(Some((StateVector::normalized(w0)?, StateVector::normalized(w1)?)))
}

fn precompensate(state: &mut StateVector, parties: usize, position: usize, tags: &[AuthTag]) -> Result<()> {
    for (i, tag) in tags.iter().enumerate().take(parties) {
        let bit = tag.bit(position);
        state.apply_if(bit, Gate::H, 2 * i)?;
        state.apply_if(bit, Gate::H, 2 * i + 1)?;
    }
    Ok(())
}

pub struct TpProductState {
    key_len: usize,
    guess: BitString,
}

impl TpProductState {
    pub fn new(key_len: usize) -> Self {
        TpProductState {
            key_len,
            guess: BitString::default(),
        }
    }
}

impl Adversary for TpProductState {
    fn tp_prepare(
        &mut self,
        position: usize,
        parties: usize,
        tp: &TpView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<Option<StateVector>> {
        let mut state = StateVector::zero(2 * parties)?;
        precompensate(&mut state, parties, position, tp.tags)?;
        Ok(Some(state))
    }

    fn tp_announce(&mut self, _position: usize, actual: &GhzLabel) -> GhzLabel {
        GhzLabel::zero(actual.parties()).expect("at least two parties")
    }

    fn after_key_extraction(
        &mut self,
        key_positions: &[usize],
        _states: &mut [SharedState],
        _rng: &mut dyn RngCore,
    ) -> Result<()> {
        debug_assert_eq!(key_positions.len(), self.key_len);
        // Every participant holds |0⟩ at every position.
        self.guess = BitString::zeros(key_positions.len());
        Ok(())
    }

    fn claims(&self) -> AttackClaims {
        AttackClaims::KeyGuess {
            guess: self.guess.clone(),
        }
    }
}

pub struct TpEntangling {
    ancilla: AncillaPair,
    measurement: Option<(StateVector, StateVector)>,
    guess: BitString,
}

impl TpEntangling {
    pub fn new(ancilla: AncillaPair) -> Self {
        let measurement = helstrom_basis(&ancilla.theta0, &ancilla.theta1).expect("same width");
        TpEntangling {
            ancilla,
            measurement,
            guess: BitString::default(),
        }
    }

    /// `(|0…0⟩|θ₀⟩ + |1…1⟩|θ₁⟩)/√2` on the participants' qubits, TP's
    /// qubits in `|0⟩`, laid out as `(T₁, P₁, …, T_m, P_m, ancilla…)`.
    fn alpha(&self, parties: usize) -> Result<StateVector> {
        let k = self.ancilla.qubits();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (parties + k)];
        let all_ones = (1 << parties) - 1;
        for a in 0..1 << k {
            amps[a] = self.ancilla.theta0.amplitude(a) * h;
            amps[(all_ones << k) | a] = self.ancilla.theta1.amplitude(a) * h;
        }
        let alpha = StateVector::from_amplitudes(amps)?;
        let joint = alpha.tensor(&StateVector::zero(parties)?)?;
        let mut order = Vec::with_capacity(2 * parties + k);
        for i in 0..parties {
            order.push(parties + k + i);
            order.push(i);
        }
        order.extend(parties..parties + k);
        joint.permuted(&order)
    }
}

impl Adversary for TpEntangling {
    fn tp_prepare(
        &mut self,
        position: usize,
        parties: usize,
        tp: &TpView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<Option<StateVector>> {
        let mut state = self.alpha(parties)?;
        precompensate(&mut state, parties, position, tp.tags)?;
        Ok(Some(state))
    }

    fn tp_announce(&mut self, _position: usize, actual: &GhzLabel) -> GhzLabel {
        GhzLabel::zero(actual.parties()).expect("at least two parties")
    }

    fn after_key_extraction(
        &mut self,
        key_positions: &[usize],
        states: &mut [SharedState],
        rng: &mut dyn RngCore,
    ) -> Result<()> {
        let mut guess = BitString::default();
        for &p in key_positions {
            let bit = match &self.measurement {
                None => false,
                Some((w0, _)) => {
                    let shared = &states[p];
                    let ancilla: Vec<usize> = (0..shared.extras()).map(|e| shared.extra_qubit(e)).collect();
                    let (p0, _) = shared.state.project_onto(&ancilla, w0)?;
                    rng.random::<f64>() >= p0
                }
            };
            guess.push(bit);
        }
        self.guess = guess;
        Ok(())
    }

    fn claims(&self) -> AttackClaims {
        AttackClaims::KeyGuess {
            guess: self.guess.clone(),
        }
    }
}

/// Exact per-position figures for the entangling attack.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglingAnalysis {
    /// `[re, im]` of `⟨θ₀|θ₁⟩`.
    pub overlap: [f64; 2],
    pub x_basis_error_rate: f64,
    pub z_basis_error_rate: f64,
    /// Best success probability for TP's key-bit guess from the ancilla.
    pub guess_success: f64,
    pub tp_guess_advantage: f64,
}

/// Pushes one position through preparation, encoding, swap, and
/// corrections under the entangling attack, then reads the detection error
/// rates and TP's discrimination advantage off the resulting state.
pub fn tp_entangling_attack(
    ancilla: &AncillaPair,
    config: &ProtocolConfig,
    rng: &mut dyn RngCore,
) -> Result<EntanglingAnalysis> {
    config.validate()?;
    let m = config.parties;
    let mut attack = TpEntangling::new(ancilla.clone());
    let tags: Vec<AuthTag> = (0..m)
        .map(|_| AuthTag(BitString::new(vec![rng.random_bool(0.5)])))
        .collect();
    let prepared = attack
        .tp_prepare(0, m, &TpView { tags: &tags }, rng)?
        .expect("entangling attack replaces the preparation");
    let mut position = PositionState::new(prepared, m)?;
    let bits: Vec<bool> = tags.iter().map(|t| t.bit(0)).collect();
    apply_auth_encoding(&mut position, &bits, &bits)?;
    let (actual, mut shared) = tp_swap(&position, rng)?;
    let announced = attack.tp_announce(0, &actual);
    apply_corrections(&mut shared, &announced, &[])?;

    let parties = shared.party_qubits();
    let error_rate = |basis: Basis| -> Result<f64> {
        let probs = shared.state.outcome_probabilities(&parties, basis)?;
        Ok(probs
            .iter()
            .enumerate()
            .filter(|(i, _)| violates_correlation(basis, BitString::from_index(*i, m).bits()))
            .map(|(_, p)| p)
            .sum())
    };
    let x_basis_error_rate = error_rate(Basis::X)?;
    let z_basis_error_rate = error_rate(Basis::Computational)?;

    let (p0, a0) = shared.state.project_onto(&parties, &make_basis_state(m, &vec![false; m])?)?;
    let (p1, a1) = shared.state.project_onto(&parties, &make_basis_state(m, &vec![true; m])?)?;
    let guess_success = match (a0, a1) {
        (Some(a0), Some(a1)) => match helstrom_basis(&a0, &a1)? {
            None => 0.5,
            Some((w0, w1)) => {
                let hit0 = w0.inner(&a0)?.norm_sqr();
                let hit1 = w1.inner(&a1)?.norm_sqr();
                (p0 * hit0 + p1 * hit1) / (p0 + p1)
            }
        },
        _ => 1.0,
    };
    let c = ancilla.overlap();
    Ok(EntanglingAnalysis {
        overlap: [c.re, c.im],
        x_basis_error_rate,
        z_basis_error_rate,
        guess_success,
        tp_guess_advantage: guess_success - 0.5,
    })
}

/// One run with TP preparing `|0…0⟩` product states.
pub fn tp_product_state_attack(config: &ProtocolConfig, rng: &mut dyn RngCore) -> Result<RunReport> {
    run_protocol(config, Some(&AttackSpec::TpProductState), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn helstrom_success_matches_closed_form() {
        for r in [0.0, 0.25, 0.5, 0.75, 0.99] {
            let pair = AncillaPair::with_overlap(r).unwrap();
            let (w0, w1) = helstrom_basis(&pair.theta0, &pair.theta1).unwrap().unwrap();
            assert!(w0.inner(&w1).unwrap().norm() < 1e-12);
            let success = 0.5 * (w0.inner(&pair.theta0).unwrap().norm_sqr() + w1.inner(&pair.theta1).unwrap().norm_sqr());
            let expected = 0.5 * (1.0 + (1.0 - r * r).sqrt());
            assert!((success - expected).abs() < 1e-12, "r={r}: {success} vs {expected}");
        }
        let same = AncillaPair::with_overlap(1.0).unwrap();
        assert!(helstrom_basis(&same.theta0, &same.theta1).unwrap().is_none());
    }

    #[test]
    fn overlap_out_of_range_rejected() {
        assert!(AncillaPair::with_overlap(1.5).is_err());
        assert!(AncillaPair::with_overlap(-0.1).is_err());
    }

    #[test]
    fn alpha_has_ancilla_on_extremes() {
        let attack = TpEntangling::new(AncillaPair::with_overlap(0.0).unwrap());
        let s = attack.alpha(2).unwrap();
        assert_eq!(s.num_qubits(), 5);
        // (T₁,P₁,T₂,P₂,a): |0000⟩|0⟩ and |0101⟩|1⟩.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0b00000).re - h).abs() < 1e-12);
        assert!((s.amplitude(0b01011).re - h).abs() < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_ancillas_are_harmless() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let config = ProtocolConfig::new(3, 8, 2, 2).unwrap();
        let a = tp_entangling_attack(&AncillaPair::with_overlap(1.0).unwrap(), &config, &mut rng).unwrap();
        assert!(a.x_basis_error_rate.abs() < 1e-10);
        assert!(a.tp_guess_advantage.abs() < 1e-10);
        let a = tp_entangling_attack(&AncillaPair::with_overlap(0.0).unwrap(), &config, &mut rng).unwrap();
        assert!((a.x_basis_error_rate - 0.5).abs() < 1e-10);
        assert!((a.tp_guess_advantage - 0.5).abs() < 1e-10);
        assert!(a.z_basis_error_rate.abs() < 1e-12);
    }
}
