use std::path::Path;

use serde::Serialize;

use super::scenario::ScenarioConfig;
use super::stats::{RatioStat, StatSummary};
use crate::adversaries::{AttackOutcome, AttackSpec};
use crate::error::{QkaError, Result};
use crate::oracle::{oracle_run_detection, RunOracle};
use crate::protocol::{run_protocol, AbortReason, Transcript};
use crate::rng::trial_rng;

pub const REPORT_SCHEMA_VERSION: &str = "qka-report/1";

/// What the batch keeps from one run.
#[derive(Clone, Debug)]
pub struct TrialResult {
    pub passed: bool,
    pub abort: Option<AbortReason>,
    pub keys_identical: bool,
    /// Ones and length of participant 1's key.
    pub key_ones: usize,
    pub key_bits: usize,
    pub attack: Option<AttackOutcome>,
}

fn run_trial(scenario: &ScenarioConfig, trial: usize) -> Result<(TrialResult, Transcript)> {
    let mut rng = trial_rng(scenario.seed, trial as u64);
    let report = run_protocol(&scenario.protocol, scenario.attack.as_ref(), &mut rng)?;
    let (key_ones, key_bits) = match &report.keys {
        Some(keys) => (keys[0].count_ones(), keys[0].len()),
        None => (0, 0),
    };
    let result = TrialResult {
        passed: report.passed,
        abort: report.transcript.abort_reason.clone(),
        keys_identical: report.keys_agree(),
        key_ones,
        key_bits,
        attack: report.attack,
    };
    Ok((result, report.transcript))
}

/// Runs every trial; results come back in trial order whatever the
/// execution order. Returns trial 0's transcript alongside.
pub fn run_trials(scenario: &ScenarioConfig) -> Result<(Vec<TrialResult>, Transcript)> {
    scenario.validate()?;
    let (first, transcript) = run_trial(scenario, 0)?;
    let rest = |t: usize| run_trial(scenario, t).map(|(r, _)| r);
    #[cfg(feature = "parallel")]
    let others: Vec<TrialResult> = {
        use rayon::prelude::*;
        (1..scenario.trials).into_par_iter().map(rest).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let others: Vec<TrialResult> = (1..scenario.trials).map(rest).collect::<Result<_>>()?;
    let mut results = Vec::with_capacity(scenario.trials);
    results.push(first);
    results.extend(others);
    Ok((results, transcript))
}

/// Per-kind attack figures aggregated over the batch.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AttackMetrics {
    /// Particles the external eavesdropper measured.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercepted_particles: Option<usize>,
    /// Eve's inferred tag bits that were right; reference is a coin flip.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag_inference: Option<RatioStat>,
    /// Passing runs in which the dishonest party's target bit came out.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_bit_hits: Option<RatioStat>,
    /// TP's guessed key bits that matched, over passing runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tp_key_guess: Option<RatioStat>,
    /// Impersonator's encoding guesses that were wrong.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub impersonation_wrong_guesses: Option<RatioStat>,
}

fn aggregate_attack(results: &[TrialResult]) -> AttackMetrics {
    let mut m = AttackMetrics::default();
    let (mut a, mut b) = (0usize, 0usize);
    for outcome in results.iter().filter_map(|r| r.attack.as_ref()) {
        match outcome {
            AttackOutcome::ExternalInterceptResend { intercepted } => {
                *m.intercepted_particles.get_or_insert(0) += intercepted;
            }
            AttackOutcome::HashLeakInterceptResend {
                inferred_bits,
                correct_bits,
            } => {
                a += correct_bits;
                b += inferred_bits;
                m.tag_inference = Some(RatioStat::new(a, b, Some(0.5)));
            }
            AttackOutcome::DishonestParticipant {
                target_bit,
                achieved_bit,
                ..
            } => {
                if let Some(bit) = achieved_bit {
                    a += (bit == target_bit) as usize;
                    b += 1;
                }
                m.target_bit_hits = Some(RatioStat::new(a, b, Some(0.5)));
            }
            AttackOutcome::TpKeyGuess {
                guessed_bits,
                correct_bits,
            } => {
                if let Some(c) = correct_bits {
                    a += c;
                    b += guessed_bits;
                }
                m.tp_key_guess = Some(RatioStat::new(a, b, None));
            }
            AttackOutcome::Impersonation { guesses, wrong_guesses } => {
                a += wrong_guesses;
                b += guesses;
                m.impersonation_wrong_guesses = Some(RatioStat::new(a, b, Some(0.5)));
            }
        }
    }
    m
}

/// One row comparing the oracle, the published figure, and the batch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    pub attack: String,
    pub parties: usize,
    pub delta: usize,
    pub zeta: usize,
    pub p_oracle: f64,
    pub p_paper_claim: Option<f64>,
    pub p_monte_carlo: f64,
    pub abs_z_score: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: String,
    /// The scenario that produced this report, without its output path.
    pub scenario: ScenarioConfig,
    pub summary: StatSummary,
    pub oracle: RunOracle,
    pub comparison: OracleComparison,
    pub aborts_first_detection: usize,
    pub aborts_second_detection: usize,
    pub passed_runs: usize,
    pub identical_key_runs: usize,
    /// Ones in participant 1's keys across passing runs.
    pub key_bits: RatioStat,
    pub attack_metrics: AttackMetrics,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub sample_transcript: Transcript,
}

/// Attacks under which every passing run still leaves all keys equal.
fn keeps_keys_identical(attack: Option<&AttackSpec>) -> bool {
    match attack {
        None
        | Some(AttackSpec::DishonestParticipant { .. })
        | Some(AttackSpec::CollusiveParticipants { .. })
        | Some(AttackSpec::TpProductState)
        | Some(AttackSpec::TpEntangling { .. }) => true,
        Some(AttackSpec::ExternalInterceptResend { attack_signals, .. }) => !attack_signals,
        _ => false,
    }
}

/// Attacks that leave the key uniformly random.
fn keeps_keys_uniform(attack: Option<&AttackSpec>) -> bool {
    match attack {
        None | Some(AttackSpec::DishonestParticipant { .. }) | Some(AttackSpec::CollusiveParticipants { .. }) => true,
        Some(AttackSpec::ExternalInterceptResend { attack_signals, .. }) => !attack_signals,
        _ => false,
    }
}

/// Runs the scenario and assembles the report.
pub fn run_scenario(scenario: &ScenarioConfig) -> Result<Report> {
    let (results, sample_transcript) = run_trials(scenario)?;
    let attack = scenario.attack.as_ref();
    let oracle = oracle_run_detection(attack, &scenario.protocol)?;
    let trials = results.len();
    let aborts = results.iter().filter(|r| !r.passed).count();
    let summary = StatSummary::new(trials, aborts, Some(oracle.p_abort), oracle.paper_claim);
    let passed_runs = trials - aborts;
    let identical_key_runs = results.iter().filter(|r| r.keys_identical).count();
    let key_bits = RatioStat::new(
        results.iter().map(|r| r.key_ones).sum(),
        results.iter().map(|r| r.key_bits).sum(),
        keeps_keys_uniform(attack).then_some(0.5),
    );
    let attack_metrics = aggregate_attack(&results);

    let mut checks = vec![Check {
        name: "abort_rate_vs_oracle".into(),
        passed: summary.matches_oracle.unwrap_or(true),
    }];
    if keeps_keys_identical(attack) {
        checks.push(Check {
            name: "keys_identical".into(),
            passed: identical_key_runs == passed_runs,
        });
    }
    if key_bits.expected.is_some() {
        checks.push(Check {
            name: "key_bit_frequency".into(),
            passed: key_bits.consistent(),
        });
    }
    if let Some(hits) = &attack_metrics.target_bit_hits {
        checks.push(Check {
            name: "target_bit_frequency".into(),
            passed: hits.consistent(),
        });
    }
    let passed = checks.iter().all(|c| c.passed);

    let count = |stage: fn(&AbortReason) -> bool| results.iter().filter(|r| r.abort.as_ref().is_some_and(stage)).count();
    Ok(Report {
        schema_version: REPORT_SCHEMA_VERSION.into(),
        scenario: ScenarioConfig {
            output_path: None,
            ..scenario.clone()
        },
        comparison: OracleComparison {
            attack: attack.map_or("none", |a| a.kind_name()).into(),
            parties: scenario.protocol.parties,
            delta: scenario.protocol.delta,
            zeta: scenario.protocol.zeta,
            p_oracle: oracle.p_abort,
            p_paper_claim: oracle.paper_claim,
            p_monte_carlo: summary.abort_rate,
            abs_z_score: summary.z_score_vs_oracle.map(f64::abs),
        },
        summary,
        oracle,
        aborts_first_detection: count(|a| matches!(a, AbortReason::FirstDetection { .. })),
        aborts_second_detection: count(|a| matches!(a, AbortReason::SecondDetection { .. })),
        passed_runs,
        identical_key_runs,
        key_bits,
        attack_metrics,
        checks,
        passed,
        sample_transcript,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(value)?).map_err(|source| QkaError::Io {
        path: path.display().to_string(),
        source,
    })
}
