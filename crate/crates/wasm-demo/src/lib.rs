//! Browser bindings. Every export takes and returns JSON text so the page
//! needs no generated type glue.

use qka_core::adversaries::{tp_entangling_attack, AncillaPair, AttackSpec};
use qka_core::harness::{run_scenario, ScenarioConfig};
use qka_core::oracle::{oracle_run_detection, paper_claim};
use qka_core::protocol::ProtocolConfig;
use qka_core::rng::trial_rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Keeps a click on "simulate" under a few seconds in the browser.
pub const MAX_BROWSER_TRIALS: usize = 20_000;
pub const MAX_CURVE_DELTA: usize = 64;
pub const MAX_SWEEP_STEPS: usize = 200;

#[derive(Serialize)]
struct CurvePoint {
    delta: usize,
    p_abort: f64,
    p_abort_first_detection: f64,
    p_abort_second_detection: f64,
    paper_claim: Option<f64>,
}

#[derive(Serialize)]
struct SweepPoint {
    overlap: f64,
    x_basis_error_rate: f64,
    tp_guess_advantage: f64,
}

#[derive(Serialize)]
struct Simulation {
    attack: String,
    trials: usize,
    aborts: usize,
    abort_rate: f64,
    wilson_interval_95: [f64; 2],
    p_oracle: f64,
    p_paper_claim: Option<f64>,
    abs_z_score: Option<f64>,
    identical_key_runs: usize,
    passed_runs: usize,
    checks: Vec<(String, bool)>,
    passed: bool,
}

fn parse_attack(attack_json: &str) -> Result<Option<AttackSpec>, String> {
    let trimmed = attack_json.trim();
    if trimmed.is_empty() || trimmed == "null" {
        return Ok(None);
    }
    serde_json::from_str(trimmed).map(Some).map_err(|e| e.to_string())
}

fn to_text<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Oracle abort probability for δ = 1..=max_delta.
pub fn oracle_curve_json(attack_json: &str, parties: usize, zeta: usize, max_delta: usize) -> Result<String, String> {
    if !(1..=MAX_CURVE_DELTA).contains(&max_delta) {
        return Err(format!("max_delta must lie in 1..={MAX_CURVE_DELTA}"));
    }
    let attack = parse_attack(attack_json)?;
    let mut points = Vec::with_capacity(max_delta);
    for delta in 1..=max_delta {
        let config = ProtocolConfig::new(parties, 1, delta, zeta).map_err(|e| e.to_string())?;
        let run = oracle_run_detection(attack.as_ref(), &config).map_err(|e| e.to_string())?;
        points.push(CurvePoint {
            delta,
            p_abort: run.p_abort,
            p_abort_first_detection: run.p_abort_first_detection,
            p_abort_second_detection: run.p_abort_second_detection,
            paper_claim: paper_claim(attack.as_ref(), &config),
        });
    }
    to_text(&points)
}

/// Entangling attack at `steps + 1` evenly spaced real overlaps in [0, 1].
pub fn entangling_sweep_json(parties: usize, steps: usize) -> Result<String, String> {
    let config = ProtocolConfig::new(parties, 1, 1, 1).map_err(|e| e.to_string())?;
    if !(1..=MAX_SWEEP_STEPS).contains(&steps) {
        return Err(format!("steps must lie in 1..={MAX_SWEEP_STEPS}"));
    }
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let overlap = k as f64 / steps as f64;
        let pair = AncillaPair::with_overlap(overlap).map_err(|e| e.to_string())?;
        let analysis = tp_entangling_attack(&pair, &config, &mut trial_rng(0, k as u64)).map_err(|e| e.to_string())?;
        points.push(SweepPoint {
            overlap,
            x_basis_error_rate: analysis.x_basis_error_rate,
            tp_guess_advantage: analysis.tp_guess_advantage,
        });
    }
    to_text(&points)
}

/// Seeded Monte Carlo batch; `scenario_json` uses the scenario file format.
pub fn simulate_json(scenario_json: &str) -> Result<String, String> {
    let scenario = ScenarioConfig::from_json(scenario_json).map_err(|e| e.to_string())?;
    if scenario.trials > MAX_BROWSER_TRIALS {
        return Err(format!("at most {MAX_BROWSER_TRIALS} trials in the browser"));
    }
    let report = run_scenario(&scenario).map_err(|e| e.to_string())?;
    to_text(&Simulation {
        attack: report.comparison.attack.clone(),
        trials: report.summary.trials,
        aborts: report.summary.aborts,
        abort_rate: report.summary.abort_rate,
        wilson_interval_95: report.summary.wilson_interval_95,
        p_oracle: report.comparison.p_oracle,
        p_paper_claim: report.comparison.p_paper_claim,
        abs_z_score: report.comparison.abs_z_score,
        identical_key_runs: report.identical_key_runs,
        passed_runs: report.passed_runs,
        checks: report.checks.iter().map(|c| (c.name.clone(), c.passed)).collect(),
        passed: report.passed,
    })
}

#[wasm_bindgen]
pub fn oracle_curve(attack_json: &str, parties: usize, zeta: usize, max_delta: usize) -> Result<String, JsError> {
    oracle_curve_json(attack_json, parties, zeta, max_delta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn entangling_sweep(parties: usize, steps: usize) -> Result<String, JsError> {
    entangling_sweep_json(parties, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(scenario_json: &str) -> Result<String, JsError> {
    simulate_json(scenario_json).map_err(|e| JsError::new(&e))
}
