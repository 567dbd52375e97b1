//! Oracle tables and plain-text rendering for the command line.

use std::fmt::Write;

use serde::Serialize;

use super::batch::Report;
use super::identities::IdentityReport;
use crate::adversaries::{tp_entangling_attack, AttackSpec};
use crate::error::Result;
use crate::oracle::{oracle_impersonation_conditional, oracle_run_detection};
use crate::protocol::ProtocolConfig;
use crate::rng::trial_rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRow {
    pub quantity: String,
    pub oracle: f64,
    pub paper_claim: Option<f64>,
    /// `oracle − paper_claim`.
    pub difference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleTable {
    pub attack: String,
    pub parties: usize,
    pub delta: usize,
    pub zeta: usize,
    pub rows: Vec<OracleRow>,
}

fn row(quantity: &str, oracle: f64, paper_claim: Option<f64>) -> OracleRow {
    OracleRow {
        quantity: quantity.into(),
        oracle,
        paper_claim,
        difference: paper_claim.map(|p| oracle - p),
    }
}

pub fn oracle_table(attack: Option<&AttackSpec>, config: &ProtocolConfig) -> Result<OracleTable> {
    let run = oracle_run_detection(attack, config)?;
    let mut rows = vec![
        row("per_particle_detect_z", run.per_particle.p_detect_z, None),
        row("per_particle_detect_x", run.per_particle.p_detect_x, None),
        row("per_particle_detect", run.per_particle.p_detect, None),
        row("per_decoy_error", run.per_decoy_error, None),
    ];
    if let Some(AttackSpec::Impersonation {
        target,
        random_correction,
    }) = attack
    {
        let c = oracle_impersonation_conditional(config.parties, *target, *random_correction)?;
        rows.push(row("wrong_guess_detect_z", c.p_detect_z, None));
        rows.push(row("wrong_guess_detect_x", c.p_detect_x, None));
        rows.push(row("wrong_guess_detect", c.p_detect, None));
    }
    if let Some(AttackSpec::TpEntangling { ancilla }) = attack {
        // Exact; the stream only picks tag bits and labels, which cancel.
        let a = tp_entangling_attack(&ancilla.to_pair()?, config, &mut trial_rng(0, 0))?;
        rows.push(row("x_basis_error_rate", a.x_basis_error_rate, None));
        rows.push(row("tp_guess_advantage", a.tp_guess_advantage, None));
    }
    rows.push(row("abort_first_detection", run.p_abort_first_detection, None));
    rows.push(row("abort_second_detection", run.p_abort_second_detection, None));
    rows.push(row("abort", run.p_abort, run.paper_claim));
    Ok(OracleTable {
        attack: attack.map_or("none", |a| a.kind_name()).into(),
        parties: config.parties,
        delta: config.delta,
        zeta: config.zeta,
        rows,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

pub fn render_oracle_table(table: &OracleTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "attack {}  m={} delta={} zeta={}",
        table.attack, table.parties, table.delta, table.zeta
    );
    let _ = writeln!(out, "{:<26} {:>12} {:>12} {:>12}", "quantity", "oracle", "published", "diff");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{:<26} {:>12.6} {:>12} {:>12}",
            r.quantity,
            r.oracle,
            opt(r.paper_claim),
            opt(r.difference)
        );
    }
    out
}

pub fn render_report(report: &Report) -> String {
    let s = &report.summary;
    let c = &report.comparison;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "attack {}  m={} n={} delta={} zeta={}  trials={} seed={}",
        c.attack,
        c.parties,
        report.scenario.protocol.key_len,
        c.delta,
        c.zeta,
        s.trials,
        report.scenario.seed
    );
    let _ = writeln!(
        out,
        "{:<12} {:>10} {:>10} {:>10} {:>23} {:>8}",
        "", "oracle", "published", "observed", "wilson 95%", "|z|"
    );
    let _ = writeln!(
        out,
        "{:<12} {:>10.6} {:>10} {:>10.6} {:>23} {:>8}",
        "abort rate",
        c.p_oracle,
        c.p_paper_claim.map_or_else(|| "-".into(), |p| format!("{p:.6}")),
        c.p_monte_carlo,
        format!("[{:.6}, {:.6}]", s.wilson_interval_95[0], s.wilson_interval_95[1]),
        c.abs_z_score.map_or_else(|| "-".into(), |z| format!("{z:.2}"))
    );
    let _ = writeln!(
        out,
        "aborts {} (first detection {}, second {}), passed {}, identical keys {}",
        s.aborts, report.aborts_first_detection, report.aborts_second_detection, report.passed_runs, report.identical_key_runs
    );
    if report.key_bits.total > 0 {
        let _ = writeln!(
            out,
            "key bit frequency {:.6} over {} bits",
            report.key_bits.frequency, report.key_bits.total
        );
    }
    let m = &report.attack_metrics;
    let ratios = [
        ("tag inference accuracy", &m.tag_inference),
        ("target bit hit rate", &m.target_bit_hits),
        ("tp key guess accuracy", &m.tp_key_guess),
        ("impersonation wrong guesses", &m.impersonation_wrong_guesses),
    ];
    for (name, stat) in ratios {
        match stat {
            Some(r) if r.total > 0 => {
                let _ = writeln!(out, "{name} {:.6} ({}/{})", r.frequency, r.successes, r.total);
            }
            Some(_) => {
                let _ = writeln!(out, "{name} - (no samples)");
            }
            None => {}
        }
    }
    if let Some(n) = m.intercepted_particles {
        let _ = writeln!(out, "intercepted particles {n}");
    }
    for check in &report.checks {
        let _ = writeln!(out, "[{}] {}", if check.passed { "PASS" } else { "FAIL" }, check.name);
    }
    out
}

pub fn render_identities(report: &IdentityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<36} {:>3} {:>14}  result", "identity", "m", "max deviation");
    for c in &report.checks {
        let _ = writeln!(
            out,
            "{:<36} {:>3} {:>14.3e}  {}",
            c.name,
            c.parties.map_or_else(|| "-".into(), |m| m.to_string()),
            c.max_deviation,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    out
}
