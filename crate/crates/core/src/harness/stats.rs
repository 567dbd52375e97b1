use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// |z| at or above this counts as a statistical mismatch.
pub const Z_THRESHOLD: f64 = 4.0;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> [f64; 2] {
    if trials == 0 {
        return [0.0, 1.0];
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    [lo, hi]
}

/// z-score of an observed frequency against a hypothesized probability,
/// using the hypothesized variance. `None` when that variance vanishes.
pub fn z_score(successes: usize, trials: usize, expected: f64) -> Option<f64> {
    if trials == 0 {
        return None;
    }
    let n = trials as f64;
    let sigma = (expected * (1.0 - expected) / n).sqrt();
    (sigma > 0.0).then(|| (successes as f64 / n - expected) / sigma)
}

/// Whether an observation is consistent with `expected`: |z| < 4, or an
/// exact match when the expected variance is zero.
pub fn consistent(successes: usize, trials: usize, expected: f64) -> bool {
    match z_score(successes, trials, expected) {
        Some(z) => z.abs() < Z_THRESHOLD,
        None => {
            let rate = successes as f64 / trials.max(1) as f64;
            (rate - expected).abs() < 1e-12
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub trials: usize,
    pub aborts: usize,
    pub abort_rate: f64,
    pub standard_error: f64,
    pub wilson_interval_95: [f64; 2],
    pub oracle_value: Option<f64>,
    pub paper_claim_value: Option<f64>,
    /// Against the oracle, with the oracle's variance; `null` when that
    /// variance is zero.
    pub z_score_vs_oracle: Option<f64>,
    pub matches_oracle: Option<bool>,
}

impl StatSummary {
    pub fn new(trials: usize, aborts: usize, oracle: Option<f64>, paper_claim: Option<f64>) -> Self {
        let rate = aborts as f64 / trials.max(1) as f64;
        StatSummary {
            trials,
            aborts,
            abort_rate: rate,
            standard_error: (rate * (1.0 - rate) / trials.max(1) as f64).sqrt(),
            wilson_interval_95: wilson_interval(aborts, trials, Z_95),
            oracle_value: oracle,
            paper_claim_value: paper_claim,
            z_score_vs_oracle: oracle.and_then(|o| z_score(aborts, trials, o)),
            matches_oracle: oracle.map(|o| consistent(aborts, trials, o)),
        }
    }
}

/// A frequency with an optional reference value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStat {
    pub successes: usize,
    pub total: usize,
    pub frequency: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_score: Option<f64>,
}

impl RatioStat {
    pub fn new(successes: usize, total: usize, expected: Option<f64>) -> Self {
        RatioStat {
            successes,
            total,
            frequency: if total == 0 { 0.0 } else { successes as f64 / total as f64 },
            expected,
            z_score: expected.and_then(|e| z_score(successes, total, e)),
        }
    }

    pub fn consistent(&self) -> bool {
        match self.expected {
            Some(e) => self.total == 0 || consistent(self.successes, self.total, e),
            None => true,
        }
    }
}
