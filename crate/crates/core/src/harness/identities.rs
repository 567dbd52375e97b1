//! Numerical checks of the algebraic identities the protocol relies on.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::qsim::{bell_pair, ghz_state, phi_plus_pairs, BellKind, Gate, GhzLabel, StateVector};

pub const IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parties: Option<usize>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub passed: bool,
}

fn check(name: &str, parties: Option<usize>, max_deviation: f64) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        parties,
        max_deviation,
        tolerance: IDENTITY_TOLERANCE,
        passed: max_deviation < IDENTITY_TOLERANCE,
    }
}

fn amplitude_gap(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn phase_gap(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok((1.0 - a.fidelity(b)?).abs())
}

fn combine(a: &StateVector, ca: f64, b: &StateVector, cb: f64) -> Result<StateVector> {
    StateVector::from_amplitudes(
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x * ca + y * cb)
            .collect(),
    )
}

/// `(I⊗H)|φ±⟩ = (|φ∓⟩ + |ψ±⟩)/√2`, `(I⊗H)|ψ±⟩ = (|φ±⟩ − |ψ∓⟩)/√2`,
/// compared amplitude by amplitude.
fn one_sided_hadamard() -> Result<f64> {
    use BellKind::*;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cases = [
        (PhiPlus, PhiMinus, PsiPlus, 1.0),
        (PhiMinus, PhiPlus, PsiMinus, 1.0),
        (PsiPlus, PhiPlus, PsiMinus, -1.0),
        (PsiMinus, PhiMinus, PsiPlus, -1.0),
    ];
    let mut worst: f64 = 0.0;
    for (input, first, second, sign) in cases {
        let lhs = bell_pair(input).with_gate(Gate::H, 1)?;
        let rhs = combine(&bell_pair(first), h, &bell_pair(second), sign * h)?;
        worst = worst.max(amplitude_gap(&lhs, &rhs));
    }
    Ok(worst)
}

/// `(H⊗H)` fixes `|φ⁺⟩` and `|ψ⁻⟩` up to global phase. It exchanges the
/// other two.
fn two_sided_hadamard() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for kind in [BellKind::PhiPlus, BellKind::PsiMinus] {
        let s = bell_pair(kind).with_gate(Gate::H, 0)?.with_gate(Gate::H, 1)?;
        worst = worst.max(phase_gap(&s, &bell_pair(kind))?);
    }
    Ok(worst)
}

/// Applying each holder's correction to every GHZ basis state gives the
/// all-zero label state.
fn correction_algebra(m: usize) -> Result<f64> {
    let target = ghz_state(&GhzLabel::zero(m)?);
    let mut worst: f64 = 0.0;
    for label in GhzLabel::all(m)? {
        let mut s = ghz_state(&label);
        for i in 0..m {
            s.apply_gate(label.correction(i), i)?;
        }
        worst = worst.max(phase_gap(&s, &target)?);
    }
    Ok(worst)
}

/// `⟨L₁|_T ⟨L₂|_P` of m Bell pairs: squared magnitude `2^{−m}` on the
/// diagonal, zero off it.
fn swapping_decomposition(m: usize) -> Result<f64> {
    let pairs = phi_plus_pairs(m)?;
    let t: Vec<usize> = (0..m).map(|i| 2 * i).collect();
    let labels = GhzLabel::all(m)?;
    let diagonal = 1.0 / (1usize << m) as f64;
    let mut worst: f64 = 0.0;
    for l1 in &labels {
        let (p, residual) = pairs.project_onto(&t, &ghz_state(l1))?;
        for l2 in &labels {
            let c = match &residual {
                Some(r) => ghz_state(l2).inner(r)? * p.sqrt(),
                None => Complex64::new(0.0, 0.0),
            };
            let dev = if l1 == l2 { (c.norm_sqr() - diagonal).abs() } else { c.norm() };
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

/// In the X basis the all-zero GHZ state has only even-parity components,
/// each with amplitude `2^{−(m−1)/2}`.
fn x_basis_parity(m: usize) -> Result<f64> {
    let mut s = ghz_state(&GhzLabel::zero(m)?);
    for q in 0..m {
        s.apply_gate(Gate::H, q)?;
    }
    let even = 2f64.powf(-((m - 1) as f64) / 2.0);
    Ok((0..s.dim())
        .map(|i| {
            let expected = if i.count_ones() % 2 == 0 { even } else { 0.0 };
            (s.amplitude(i) - expected).norm()
        })
        .fold(0.0, f64::max))
}

/// Swapping `|0…0⟩` on TP's qubits yields `(a, 0, …, 0)` with probability ½
/// each, leaving `|0…0⟩ = (|φ_{a0…0}⟩ + |φ_{ā0…0}⟩)/√2` with the others.
fn product_state_swap(m: usize) -> Result<f64> {
    let s = StateVector::zero(2 * m)?;
    let t: Vec<usize> = (0..m).map(|i| 2 * i).collect();
    let zeros = StateVector::zero(m)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut worst: f64 = 0.0;
    for branch in s.ghz_branches(&t)? {
        let flips = branch.label.bits()[1..].iter().any(|&b| b);
        if flips {
            worst = worst.max(branch.probability);
            continue;
        }
        worst = worst.max((branch.probability - 0.5).abs());
        let residual = branch.residual.expect("participants remain");
        worst = worst.max(phase_gap(&residual, &zeros)?);
        let a = branch.label.phase_bit();
        let mut other = vec![!a];
        other.extend(std::iter::repeat_n(false, m - 1));
        let sum = combine(&ghz_state(&branch.label), h, &ghz_state(&GhzLabel::new(other)?), h)?;
        worst = worst.max(amplitude_gap(&sum, &zeros));
    }
    Ok(worst)
}

/// Participant 1 applies H on its half alone. Each label then has
/// probability `2^{−m}` and leaves `(|φ_{a⊕1,u}⟩ + (−1)^a |φ_{a,ū}⟩)/√2`;
/// after the corrections the state is an equal superposition of
/// `|φ_{10…0}⟩` and `|φ_{01…1}⟩`.
fn wrong_guess_state(m: usize) -> Result<f64> {
    let s = phi_plus_pairs(m)?.with_gate(Gate::H, 1)?;
    let t: Vec<usize> = (0..m).map(|i| 2 * i).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut flipped_phase = vec![true];
    flipped_phase.extend(std::iter::repeat_n(false, m - 1));
    let mut flipped_rest = vec![false];
    flipped_rest.extend(std::iter::repeat_n(true, m - 1));
    let (phase_state, rest_state) = (
        ghz_state(&GhzLabel::new(flipped_phase)?),
        ghz_state(&GhzLabel::new(flipped_rest)?),
    );
    let mut worst: f64 = 0.0;
    let mut seen = 0;
    for branch in s.ghz_branches(&t)? {
        seen += 1;
        worst = worst.max((branch.probability - 1.0 / (1usize << m) as f64).abs());
        let label = &branch.label;
        let a = label.phase_bit();
        let mut first = label.bits().to_vec();
        first[0] = !a;
        let mut second: Vec<bool> = label.bits().iter().map(|b| !b).collect();
        second[0] = a;
        let sign = if a { -1.0 } else { 1.0 };
        let expected = combine(
            &ghz_state(&GhzLabel::new(first)?),
            h,
            &ghz_state(&GhzLabel::new(second)?),
            sign * h,
        )?;
        let mut residual = branch.residual.expect("participants remain");
        worst = worst.max(phase_gap(&residual, &expected)?);
        for i in 0..m {
            residual.apply_gate(label.correction(i), i)?;
        }
        worst = worst.max((phase_state.inner(&residual)?.norm_sqr() - 0.5).abs());
        worst = worst.max((rest_state.inner(&residual)?.norm_sqr() - 0.5).abs());
    }
    if seen != 1 << m {
        worst = worst.max(1.0);
    }
    Ok(worst)
}

/// Runs every identity for m = 2..=5.
pub fn verify_identities() -> Result<IdentityReport> {
    let mut checks = vec![
        check("one_sided_hadamard_on_bell_states", None, one_sided_hadamard()?),
        check("two_sided_hadamard_fixes_phi_plus", None, two_sided_hadamard()?),
    ];
    for m in 2..=5 {
        checks.push(check("ghz_correction_algebra", Some(m), correction_algebra(m)?));
        checks.push(check("entanglement_swapping", Some(m), swapping_decomposition(m)?));
        checks.push(check("ghz_x_basis_parity", Some(m), x_basis_parity(m)?));
        checks.push(check("product_state_swap", Some(m), product_state_swap(m)?));
        checks.push(check("wrong_guess_state", Some(m), wrong_guess_state(m)?));
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(IdentityReport { checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_identities_hold() {
        let report = verify_identities().unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
        assert_eq!(report.checks.len(), 22);
    }

    #[test]
    fn two_sided_hadamard_swaps_phi_minus_and_psi_plus() {
        let s = bell_pair(BellKind::PhiMinus).with_gate(Gate::H, 0).unwrap().with_gate(Gate::H, 1).unwrap();
        assert!(amplitude_gap(&s, &bell_pair(BellKind::PsiPlus)) < 1e-12);
        let s = bell_pair(BellKind::PsiMinus).with_gate(Gate::H, 0).unwrap().with_gate(Gate::H, 1).unwrap();
        assert!(amplitude_gap(&s, &bell_pair(BellKind::PsiMinus).with_gate(Gate::Z, 0).unwrap().with_gate(Gate::Z, 1).unwrap()) < 1e-12);
    }

    #[test]
    fn wrong_sign_is_caught() {
        // Flipping the second term's sign must register as a deviation.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let lhs = bell_pair(BellKind::PhiPlus).with_gate(Gate::H, 1).unwrap();
        let wrong = combine(&bell_pair(BellKind::PhiMinus), h, &bell_pair(BellKind::PsiPlus), -h).unwrap();
        assert!(amplitude_gap(&lhs, &wrong) > 0.5);
    }
}
