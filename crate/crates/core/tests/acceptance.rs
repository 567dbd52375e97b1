//! Acceptance criteria. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qka_core::adversaries::{tp_entangling_attack, Adversary, AncillaPair, AttackSpec, TpView};
use qka_core::harness::{run_scenario, to_json, verify_identities, Report, ScenarioConfig};
use qka_core::oracle::oracle_impersonation_conditional;
use qka_core::protocol::{run_with_adversary, AuthTag, PartyIdentity, ProtocolConfig};
use qka_core::qsim::StateVector;
use qka_core::rng::trial_rng;
use rand::RngCore;

const Z_LIMIT: f64 = 4.0;
const IDENTITY_TOLERANCE: f64 = 1e-12;
const ORACLE_TOLERANCE: f64 = 1e-12;
const OVERLAP_TOLERANCE: f64 = 1e-10;
const ATTACK_TRIALS: usize = 10_000;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// `(observed − p) / √(p(1−p)/n)`.
fn z(successes: usize, trials: usize, p: f64) -> f64 {
    let observed = successes as f64 / trials as f64;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (observed - p) / sigma
}

fn config(m: usize, n: usize, delta: usize, zeta: usize) -> ProtocolConfig {
    ProtocolConfig::new(m, n, delta, zeta).unwrap()
}

fn scenario(protocol: ProtocolConfig, attack: Option<AttackSpec>, trials: usize, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        protocol,
        attack,
        trials,
        seed,
        output_path: None,
    }
}

/// Runs a batch and compares its abort rate with `expected`, which the
/// caller derives by hand. The library oracle must agree with it too.
fn abort_rate_check(report: &Report, expected: f64) -> (bool, String) {
    let s = &report.summary;
    let zv = z(s.aborts, s.trials, expected);
    let oracle_agrees = (report.oracle.p_abort - expected).abs() < ORACLE_TOLERANCE;
    let detail = format!(
        "oracle {expected:.6} (library {:.6}), observed {:.6} over {}, |z| {:.2}",
        report.oracle.p_abort,
        s.abort_rate,
        s.trials,
        zv.abs()
    );
    (oracle_agrees && zv.abs() < Z_LIMIT, detail)
}

fn identities() -> Outcome {
    let start = Instant::now();
    let report = verify_identities().unwrap();
    let elapsed = start.elapsed();
    let worst = report.checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
    let mut covered: Vec<usize> = report.checks.iter().filter_map(|c| c.parties).collect();
    covered.sort_unstable();
    covered.dedup();
    let all_within = report.checks.iter().all(|c| c.max_deviation < IDENTITY_TOLERANCE);
    outcome(
        all_within && report.passed && covered == [2, 3, 4, 5] && elapsed < Duration::from_secs(5),
        format!(
            "{} checks, max deviation {worst:.2e}, parties {covered:?}, {:.3}s",
            report.checks.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn honest() -> Outcome {
    let start = Instant::now();
    let mut passed = true;
    let mut details = Vec::new();
    for (k, protocol) in [config(3, 64, 8, 16), config(5, 32, 4, 8)].into_iter().enumerate() {
        let report = run_scenario(&scenario(protocol.clone(), None, 1000, 100 + k as u64)).unwrap();
        let bits = &report.key_bits;
        let zv = z(bits.successes, bits.total, 0.5);
        let ok = report.summary.aborts == 0
            && report.identical_key_runs == 1000
            && bits.total == 1000 * protocol.key_len
            && zv.abs() < Z_LIMIT;
        passed &= ok;
        details.push(format!(
            "m={} aborts {} identical {} bit freq {:.4} |z| {:.2}",
            protocol.parties,
            report.summary.aborts,
            report.identical_key_runs,
            bits.frequency,
            zv.abs()
        ));
    }
    let elapsed = start.elapsed();
    passed &= elapsed < Duration::from_secs(60);
    details.push(format!("{:.2}s", elapsed.as_secs_f64()));
    outcome(passed, details.join("; "))
}

fn external() -> Outcome {
    let attack = AttackSpec::from_kind("external_intercept_resend").unwrap();
    let report = run_scenario(&scenario(config(3, 64, 8, 16), Some(attack), ATTACK_TRIALS, 3)).unwrap();
    // A measured decoy is wrong with probability ¼ (wrong basis, then a coin).
    let expected = 1.0 - 0.75f64.powi(16);
    let (ok, detail) = abort_rate_check(&report, expected);
    outcome(ok && report.aborts_second_detection == 0, detail)
}

fn product_state() -> Outcome {
    let report = run_scenario(&scenario(
        config(3, 64, 8, 16),
        Some(AttackSpec::TpProductState),
        ATTACK_TRIALS,
        4,
    ))
    .unwrap();
    // Per particle: Z never errs, X errs with ½, so ¼ over m·δ = 24 checks.
    let expected = 1.0 - 0.75f64.powi(24);
    let published = 1.0 - 0.25f64.powi(8);
    let (ok, detail) = abort_rate_check(&report, expected);
    let published_shown = report
        .comparison
        .p_paper_claim
        .is_some_and(|p| (p - published).abs() < ORACLE_TOLERANCE);
    outcome(ok && published_shown, format!("{detail}, published column {published:.6}"))
}

fn entangling_sweep() -> Outcome {
    let protocol = config(3, 8, 2, 2);
    let mut passed = true;
    let mut rows = Vec::new();
    for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let pair = AncillaPair::with_overlap(r).unwrap();
        let a = tp_entangling_attack(&pair, &protocol, &mut trial_rng(5, (r * 4.0) as u64)).unwrap();
        let unit = (pair.overlap().norm() - 1.0).abs() < OVERLAP_TOLERANCE;
        let zero_error = a.x_basis_error_rate.abs() < OVERLAP_TOLERANCE;
        passed &= zero_error == unit;
        if unit {
            passed &= a.tp_guess_advantage.abs() < OVERLAP_TOLERANCE;
        }
        rows.push(format!(
            "r={r}: x_err {:.4} adv {:.4}",
            a.x_basis_error_rate, a.tp_guess_advantage
        ));
    }
    outcome(passed, rows.join("; "))
}

fn impersonation() -> Outcome {
    let attack = AttackSpec::Impersonation {
        target: 1,
        random_correction: false,
    };
    let report = run_scenario(&scenario(config(3, 64, 8, 16), Some(attack), ATTACK_TRIALS, 6)).unwrap();
    // Wrong guess (½) then detection (½) in either basis: ¼ per particle.
    let expected = 1.0 - 0.75f64.powi(24);
    let published = 1.0 - (5.0f64 / 8.0).powi(8);
    let (ok, detail) = abort_rate_check(&report, expected);
    let published_shown = report
        .comparison
        .p_paper_claim
        .is_some_and(|p| (p - published).abs() < ORACLE_TOLERANCE);
    let wrong = oracle_impersonation_conditional(3, 1, false).unwrap();
    // Amplitudes of 1/√2 square to ½ only up to one ulp in f64.
    let conditional =
        (wrong.p_detect_z - 0.5).abs() < ORACLE_TOLERANCE && (wrong.p_detect_x - 0.5).abs() < ORACLE_TOLERANCE;
    outcome(
        ok && published_shown && conditional,
        format!(
            "{detail}, published column {published:.6}, wrong-guess Z {:.12} X {:.12}",
            wrong.p_detect_z, wrong.p_detect_x
        ),
    )
}

fn dishonest() -> Outcome {
    let attack = AttackSpec::DishonestParticipant {
        party: 1,
        target_bit: 1,
        key_index: 0,
    };
    let report = run_scenario(&scenario(config(3, 16, 4, 8), Some(attack), ATTACK_TRIALS, 7)).unwrap();
    let hits = report.attack_metrics.target_bit_hits.clone().unwrap();
    let zv = z(hits.successes, hits.total, 0.5);
    outcome(
        hits.total == ATTACK_TRIALS && report.identical_key_runs == ATTACK_TRIALS && zv.abs() < Z_LIMIT,
        format!(
            "target bit {}/{} ({:.4}), |z| {:.2}, identical keys {}/{}",
            hits.successes,
            hits.total,
            hits.frequency,
            zv.abs(),
            report.identical_key_runs,
            ATTACK_TRIALS
        ),
    )
}

#[derive(Default)]
struct TagRecorder {
    tags: Vec<AuthTag>,
}

impl Adversary for TagRecorder {
    fn tp_prepare(
        &mut self,
        _position: usize,
        _parties: usize,
        tp: &TpView<'_>,
        _rng: &mut dyn RngCore,
    ) -> qka_core::Result<Option<StateVector>> {
        if self.tags.is_empty() {
            self.tags = tp.tags.to_vec();
        }
        Ok(None)
    }
}

fn privacy() -> Outcome {
    let protocol = config(3, 64, 8, 16);
    let mut leaks = Vec::new();
    for trial in 0..100 {
        let mut rng = trial_rng(8, trial);
        // Identities are the first values drawn from the stream.
        let mut shadow = rng.clone();
        let ids: Vec<PartyIdentity> = (1..=3).map(|i| PartyIdentity::generate(i, &mut shadow)).collect();
        let mut recorder = TagRecorder::default();
        let report = run_with_adversary(&protocol, &mut recorder, &mut rng).unwrap();
        let json = serde_json::to_string(&report.transcript).unwrap();
        let raw = json.as_bytes();
        for id in &ids {
            let key = &id.private_key;
            if json.contains(&hex::encode(key))
                || json.contains(&hex::encode_upper(key))
                || raw.windows(key.len()).any(|w| w == key.as_slice())
            {
                leaks.push(format!("trial {trial}: key of party {}", id.party_id));
            }
        }
        for (i, tag) in recorder.tags.iter().enumerate() {
            let bits: String = tag.0.bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
            if json.contains(&bits) {
                leaks.push(format!("trial {trial}: tag of party {}", i + 1));
            }
        }
        if recorder.tags.len() != 3 {
            leaks.push(format!("trial {trial}: tags not recorded"));
        }
    }
    outcome(leaks.is_empty(), if leaks.is_empty() { "100 transcripts clean".into() } else { leaks.join(", ") })
}

fn determinism() -> Outcome {
    let mut passed = true;
    let mut sizes = Vec::new();
    let cases = [
        scenario(config(3, 64, 8, 16), None, 200, 9),
        scenario(
            config(4, 16, 4, 8),
            Some(AttackSpec::from_kind("hash_leak_intercept_resend").unwrap()),
            200,
            9,
        ),
    ];
    for case in cases {
        let a = to_json(&run_scenario(&case).unwrap()).unwrap();
        let b = to_json(&run_scenario(&case).unwrap()).unwrap();
        passed &= a.as_bytes() == b.as_bytes();
        sizes.push(a.len());
    }
    outcome(passed, format!("report sizes {sizes:?} bytes, byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("identity suite", identities),
        ("honest protocol", honest),
        ("external intercept-resend on decoys", external),
        ("tp product-state attack", product_state),
        ("tp entangling attack sweep", entangling_sweep),
        ("impersonation attack", impersonation),
        ("dishonest participant null result", dishonest),
        ("transcript privacy", privacy),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        let tag = if result.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {name}: {}", i + 1, result.detail);
        failed += !result.passed as usize;
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
