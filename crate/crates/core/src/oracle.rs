//! Exact detection probabilities by exhaustive branch enumeration.
//!
//! Nothing here samples. A single position is expanded over every tag bit,
//! guess, interception branch, GHZ outcome, correction, and detection basis
//! and outcome; run-level figures follow from composing independent checks.

use serde::Serialize;

use crate::adversaries::{AncillaPair, AttackSpec};
use crate::bits::BitString;
use crate::error::Result;
use crate::protocol::{violates_correlation, DecoyState, ProtocolConfig};
use crate::qsim::{phi_plus_pairs, Basis, Gate, GhzLabel, StateVector};

/// Leaves below this weight are numerical dust from amplitudes that cancel
/// exactly in exact arithmetic.
pub const PRUNE_BELOW: f64 = 1e-20;

/// One internal expansion step.
#[derive(Clone, Debug)]
pub struct BranchNode {
    pub probability: f64,
    pub record: String,
}

#[derive(Clone, Debug)]
pub struct Leaf {
    pub probability: f64,
    pub basis: Basis,
    pub detected: bool,
    pub record: String,
}

/// All outcomes of one detection particle.
#[derive(Clone, Debug, Default)]
pub struct BranchTree {
    pub nodes: Vec<BranchNode>,
    pub leaves: Vec<Leaf>,
}

impl BranchTree {
    pub fn total_probability(&self) -> f64 {
        self.leaves.iter().map(|l| l.probability).sum()
    }

    fn detected_in(&self, basis: Option<Basis>) -> f64 {
        self.leaves
            .iter()
            .filter(|l| l.detected && basis.is_none_or(|b| l.basis == b))
            .map(|l| l.probability)
            .sum::<f64>()
            + 0.0
    }

    pub fn per_particle(&self) -> PerParticle {
        PerParticle {
            p_detect_z: 2.0 * self.detected_in(Some(Basis::Computational)),
            p_detect_x: 2.0 * self.detected_in(Some(Basis::X)),
            p_detect: self.detected_in(None),
        }
    }
}

/// Detection probability of one detection particle, by basis and overall.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PerParticle {
    pub p_detect_z: f64,
    pub p_detect_x: f64,
    pub p_detect: f64,
}

#[derive(Clone, Debug)]
struct Weighted {
    p: f64,
    state: StateVector,
    tbits: BitString,
    record: String,
}

fn branch(items: Vec<Weighted>, tree: &mut BranchTree, f: impl Fn(&Weighted) -> Result<Vec<Weighted>>) -> Result<Vec<Weighted>> {
    let mut out = Vec::new();
    for item in &items {
        for child in f(item)? {
            if child.p > PRUNE_BELOW {
                tree.nodes.push(BranchNode {
                    probability: child.p,
                    record: child.record.clone(),
                });
                out.push(child);
            }
        }
    }
    Ok(out)
}

fn tp_q(i: usize) -> usize {
    2 * i
}

fn p_q(i: usize) -> usize {
    2 * i + 1
}

/// `(|0…0⟩|θ₀⟩ + |1…1⟩|θ₁⟩)/√2` on the P qubits, T qubits `|0⟩`, in the
/// pre-swap layout.
fn entangled_preparation(m: usize, ancilla: &AncillaPair) -> Result<StateVector> {
    let k = ancilla.qubits();
    let n = 2 * m + k;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1 << n];
    let p_mask: usize = (0..m).map(|i| 1 << (n - 1 - p_q(i))).sum();
    for a in 0..1 << k {
        amps[a] += ancilla.theta0.amplitude(a) * h;
        amps[p_mask | a] += ancilla.theta1.amplitude(a) * h;
    }
    StateVector::from_amplitudes(amps)
}

/// Which wrong/right guesses to keep for the impersonated party.
#[derive(Clone, Copy, PartialEq)]
enum GuessFilter {
    Any,
    WrongOnly,
}

fn enumerate(attack: Option<&AttackSpec>, m: usize, filter: GuessFilter) -> Result<BranchTree> {
    let config = ProtocolConfig::new(m, 1, 1, 1)?;
    if let Some(spec) = attack {
        spec.validate(&config)?;
    }
    let mut tree = BranchTree::default();
    let tp_attack = attack.is_some_and(|a| a.is_tp_role());

    // TP's tag bits at this position, uniform and independent.
    let mut items: Vec<Weighted> = Vec::new();
    for t in 0..1usize << m {
        let tbits = BitString::from_index(t, m);
        let mut state = match attack {
            Some(AttackSpec::TpProductState) => StateVector::zero(2 * m)?,
            Some(AttackSpec::TpEntangling { ancilla }) => entangled_preparation(m, &ancilla.to_pair()?)?,
            _ => phi_plus_pairs(m)?,
        };
        if tp_attack {
            // TP undoes the coming encoding in advance.
            for i in 0..m {
                state.apply_if(tbits.get(i), Gate::H, tp_q(i))?;
                state.apply_if(tbits.get(i), Gate::H, p_q(i))?;
            }
        }
        items.push(Weighted {
            p: 1.0 / (1usize << m) as f64,
            state,
            record: format!("t={tbits}"),
            tbits,
        });
    }

    // In flight on a tapped channel.
    match attack {
        Some(AttackSpec::ExternalInterceptResend {
            target,
            attack_probability: q,
            attack_signals: true,
        }) => {
            let qubit = p_q(target - 1);
            items = branch(items, &mut tree, |w| {
                let mut out = vec![Weighted {
                    p: w.p * (1.0 - q),
                    state: w.state.clone(),
                    tbits: w.tbits.clone(),
                    record: format!("{} pass", w.record),
                }];
                for basis in Basis::BOTH {
                    for b in w.state.basis_branches(&[qubit], basis)? {
                        out.push(Weighted {
                            p: w.p * q * 0.5 * b.probability,
                            state: b.post_state,
                            tbits: w.tbits.clone(),
                            record: format!("{} eve {basis:?}={}", w.record, b.outcome),
                        });
                    }
                }
                Ok(out)
            })?;
        }
        Some(AttackSpec::HashLeakInterceptResend { target, .. }) => {
            let qubit = p_q(target - 1);
            items = branch(items, &mut tree, |w| {
                DecoyState::ALL
                    .iter()
                    .map(|fake| {
                        let mut state = w.state.tensor(&fake.prepare())?;
                        let last = state.num_qubits() - 1;
                        state.swap_qubits(qubit, last)?;
                        Ok(Weighted {
                            p: w.p * 0.25,
                            state,
                            tbits: w.tbits.clone(),
                            record: format!("{} fake={fake:?}", w.record),
                        })
                    })
                    .collect()
            })?;
        }
        _ => {}
    }

    // Encoding, with the impersonator guessing.
    let impersonated = match attack {
        Some(AttackSpec::Impersonation { target, .. }) => Some(target - 1),
        _ => None,
    };
    items = branch(items, &mut tree, |w| {
        let tbits = &w.tbits;
        let guesses: Vec<Option<bool>> = match impersonated {
            Some(i) => [false, true]
                .into_iter()
                .filter(|&g| filter == GuessFilter::Any || g != tbits.get(i))
                .map(Some)
                .collect(),
            None => vec![None],
        };
        let weight = 1.0 / guesses.len() as f64;
        guesses
            .into_iter()
            .map(|guess| {
                let mut state = w.state.clone();
                for i in 0..m {
                    state.apply_if(tbits.get(i), Gate::H, tp_q(i))?;
                    let own = match (impersonated, guess) {
                        (Some(j), Some(g)) if j == i => g,
                        _ => tbits.get(i),
                    };
                    state.apply_if(own, Gate::H, p_q(i))?;
                }
                Ok(Weighted {
                    p: w.p * weight,
                    state,
                    tbits: w.tbits.clone(),
                    record: match guess {
                        Some(g) => format!("{} guess={}", w.record, g as u8),
                        None => w.record.clone(),
                    },
                })
            })
            .collect()
    })?;

    // TP's GHZ measurement and the corrections.
    let t_qubits: Vec<usize> = (0..m).map(tp_q).collect();
    let random_correction = matches!(
        attack,
        Some(AttackSpec::Impersonation {
            random_correction: true,
            ..
        })
    );
    items = branch(items, &mut tree, |w| {
        let mut out = Vec::new();
        for g in w.state.ghz_branches(&t_qubits)? {
            let announced = if tp_attack { GhzLabel::zero(m)? } else { g.label.clone() };
            let residual = g.residual.expect("participants remain");
            let variants: Vec<Option<Gate>> = if random_correction {
                vec![Some(Gate::I), Some(Gate::X)]
            } else {
                vec![None]
            };
            let weight = 1.0 / variants.len() as f64;
            for variant in variants {
                let mut state = residual.clone();
                for i in 0..m {
                    let gate = match (impersonated, variant) {
                        (Some(j), Some(v)) if j == i => v,
                        _ => announced.correction(i),
                    };
                    state.apply_gate(gate, i)?;
                }
                out.push(Weighted {
                    p: w.p * g.probability * weight,
                    state,
                    tbits: w.tbits.clone(),
                    record: format!("{} label={} announced={announced}", w.record, g.label),
                });
            }
        }
        Ok(out)
    })?;

    // Detection: basis chosen uniformly, every participant measures.
    let parties: Vec<usize> = (0..m).collect();
    for w in &items {
        for basis in Basis::BOTH {
            for b in w.state.basis_branches(&parties, basis)? {
                let p = w.p * 0.5 * b.probability;
                if p > PRUNE_BELOW {
                    tree.leaves.push(Leaf {
                        probability: p,
                        basis,
                        detected: violates_correlation(basis, b.outcome.bits()),
                        record: format!("{} {basis:?}={}", w.record, b.outcome),
                    });
                }
            }
        }
    }
    // Renormalize away a conditioning filter.
    let total = tree.total_probability();
    if filter != GuessFilter::Any && total > 0.0 {
        for leaf in &mut tree.leaves {
            leaf.probability /= total;
        }
    }
    Ok(tree)
}

/// Full branch tree for one detection particle under `attack`.
pub fn detection_tree(attack: Option<&AttackSpec>, m: usize) -> Result<BranchTree> {
    enumerate(attack, m, GuessFilter::Any)
}

/// Per-particle detection probabilities; `p_detect = ½·p_z + ½·p_x`.
pub fn oracle_per_particle_detection(attack: Option<&AttackSpec>, m: usize) -> Result<PerParticle> {
    Ok(detection_tree(attack, m)?.per_particle())
}

/// Impersonation detection conditioned on a wrong encoding guess.
pub fn oracle_impersonation_conditional(m: usize, target: usize, random_correction: bool) -> Result<PerParticle> {
    let spec = AttackSpec::Impersonation {
        target,
        random_correction,
    };
    Ok(enumerate(Some(&spec), m, GuessFilter::WrongOnly)?.per_particle())
}

/// Probability that one decoy on the attacked channel fails its check.
pub fn oracle_per_decoy_error(attack: Option<&AttackSpec>) -> Result<f64> {
    let mut total = 0.0;
    for decoy in DecoyState::ALL {
        let wrong = !decoy.bit() as usize;
        let error = match attack {
            Some(AttackSpec::ExternalInterceptResend { attack_probability: q, .. }) => {
                let mut e = 0.0;
                for basis in Basis::BOTH {
                    for b in decoy.prepare().basis_branches(&[0], basis)? {
                        e += 0.5 * b.probability * b.post_state.outcome_probabilities(&[0], decoy.basis())?[wrong];
                    }
                }
                q * e
            }
            Some(AttackSpec::HashLeakInterceptResend { .. }) => DecoyState::ALL
                .iter()
                .map(|fake| Ok(0.25 * fake.prepare().outcome_probabilities(&[0], decoy.basis())?[wrong]))
                .sum::<Result<f64>>()?,
            _ => 0.0,
        };
        total += 0.25 * error;
    }
    Ok(total)
}

/// `P(X ≤ k)` for `X ~ Binomial(n, p)`.
pub fn binomial_cdf(n: usize, p: f64, k: usize) -> f64 {
    if k >= n || p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut ln_choose = 0.0;
    let mut sum = 0.0;
    for j in 0..=k {
        if j > 0 {
            ln_choose += ((n - j + 1) as f64).ln() - (j as f64).ln();
        }
        sum += (ln_choose + j as f64 * lp + (n - j) as f64 * lq).exp();
    }
    sum.min(1.0)
}

fn pass_probability(config: &ProtocolConfig, checked: usize, p: f64) -> f64 {
    let allowed = (0..=checked)
        .take_while(|&k| !config.exceeds_threshold(k, checked))
        .last()
        .unwrap_or(0);
    binomial_cdf(checked, p, allowed)
}

/// Run-level abort probability and its parts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunOracle {
    pub per_decoy_error: f64,
    pub per_particle: PerParticle,
    pub p_abort_first_detection: f64,
    pub p_abort_second_detection: f64,
    pub p_abort: f64,
    /// The published closed form for this attack, evaluated at δ.
    pub paper_claim: Option<f64>,
}

/// The published run detection probability, where one exists.
pub fn paper_claim(attack: Option<&AttackSpec>, config: &ProtocolConfig) -> Option<f64> {
    let delta = config.delta as i32;
    match attack {
        Some(AttackSpec::TpProductState) => Some(1.0 - 0.25f64.powi(delta)),
        Some(AttackSpec::Impersonation { .. }) => Some(1.0 - 0.625f64.powi(delta)),
        _ => None,
    }
}

/// Composes per-check probabilities over the ζ decoys of every channel and
/// the δ particles of each of the m detection rounds.
pub fn oracle_run_detection(attack: Option<&AttackSpec>, config: &ProtocolConfig) -> Result<RunOracle> {
    config.validate()?;
    if let Some(spec) = attack {
        spec.validate(config)?;
    }
    let per_decoy_error = oracle_per_decoy_error(attack)?;
    let per_particle = oracle_per_particle_detection(attack, config.parties)?;
    let (target, first_enabled) = match attack {
        Some(AttackSpec::ExternalInterceptResend { target, .. }) => (Some(target - 1), true),
        Some(AttackSpec::HashLeakInterceptResend {
            target,
            second_detection_only,
        }) => (Some(target - 1), !second_detection_only),
        _ => (None, true),
    };
    let pass_first: f64 = if first_enabled {
        (0..config.parties)
            .map(|c| {
                let e = if Some(c) == target { per_decoy_error } else { 0.0 };
                pass_probability(config, config.zeta, e)
            })
            .product()
    } else {
        1.0
    };
    let pass_second = pass_probability(config, config.delta, per_particle.p_detect).powi(config.parties as i32);
    Ok(RunOracle {
        per_decoy_error,
        per_particle,
        p_abort_first_detection: 1.0 - pass_first,
        p_abort_second_detection: 1.0 - pass_second,
        p_abort: 1.0 - pass_first * pass_second,
        paper_claim: paper_claim(attack, config),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(json: &str) -> AttackSpec {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn honest_is_exactly_zero() {
        for m in 2..=5 {
            let tree = detection_tree(None, m).unwrap();
            assert!((tree.total_probability() - 1.0).abs() < 1e-12);
            assert_eq!(
                tree.per_particle(),
                PerParticle {
                    p_detect_z: 0.0,
                    p_detect_x: 0.0,
                    p_detect: 0.0
                }
            );
        }
    }

    #[test]
    fn product_state_per_particle() {
        for m in 2..=5 {
            let p = oracle_per_particle_detection(Some(&AttackSpec::TpProductState), m).unwrap();
            assert!(p.p_detect_z.abs() < 1e-12);
            assert!((p.p_detect_x - 0.5).abs() < 1e-12);
            assert!((p.p_detect - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn binomial_cdf_edges() {
        assert_eq!(binomial_cdf(5, 0.3, 5), 1.0);
        assert!((binomial_cdf(4, 0.5, 0) - 0.0625).abs() < 1e-15);
        assert!((binomial_cdf(4, 0.5, 2) - 11.0 / 16.0).abs() < 1e-12);
        assert_eq!(binomial_cdf(4, 1.0, 3), 0.0);
    }

    #[test]
    fn threshold_relaxes_abort() {
        let attack = spec(r#"{"kind":"tp_product_state"}"#);
        let strict = ProtocolConfig::new(3, 8, 8, 4).unwrap();
        let loose = strict.clone().with_threshold(0.25).unwrap();
        let a = oracle_run_detection(Some(&attack), &strict).unwrap().p_abort;
        let b = oracle_run_detection(Some(&attack), &loose).unwrap().p_abort;
        assert!((a - (1.0 - 0.75f64.powi(24))).abs() < 1e-12);
        let round_pass = binomial_cdf(8, 0.25, 2);
        assert!((b - (1.0 - round_pass.powi(3))).abs() < 1e-12);
    }
}
