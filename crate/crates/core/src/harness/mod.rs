//! Seeded batch execution, statistics, reports, and the identity suite.

mod batch;
mod identities;
mod scenario;
mod stats;
mod tables;

pub use batch::{
    run_scenario, run_trials, to_json, write_json, AttackMetrics, Check, OracleComparison, Report, TrialResult,
    REPORT_SCHEMA_VERSION,
};
pub use identities::{verify_identities, IdentityCheck, IdentityReport, IDENTITY_TOLERANCE};
pub use scenario::{ScenarioConfig, ScenarioOverrides};
pub use stats::{consistent, wilson_interval, z_score, RatioStat, StatSummary, Z_95, Z_THRESHOLD};
pub use tables::{oracle_table, render_identities, render_oracle_table, render_report, OracleRow, OracleTable};
