use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qka_core::harness::{
    oracle_table, render_identities, render_oracle_table, render_report, run_scenario, verify_identities,
    write_json, ScenarioConfig, ScenarioOverrides,
};
use qka_core::QkaError;

const EXIT_MISMATCH: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

/// Monte Carlo harness for authenticated multi-party quantum key agreement.
#[derive(Parser)]
#[command(name = "qka", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded batch of protocol executions and compare against the oracle.
    Run(ScenarioArgs),
    /// Print exact detection probabilities for an attack.
    Oracle(ScenarioArgs),
    /// Check the state identities the protocol relies on for 2 to 5 parties.
    VerifyIdentities {
        /// Also write the results as JSON.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Number of participants m.
    #[arg(long)]
    parties: Option<usize>,
    /// Raw key length n in bits.
    #[arg(long)]
    key_len: Option<usize>,
    /// Detection positions drawn by each participant.
    #[arg(long)]
    delta: Option<usize>,
    /// Decoy particles per channel.
    #[arg(long)]
    zeta: Option<usize>,
    /// Attack kind, or `none`.
    #[arg(long, value_name = "KIND")]
    attack: Option<String>,
    /// Number of independent runs.
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; run i draws from stream (seed, i).
    #[arg(long)]
    seed: Option<u64>,
    /// JSON scenario file; flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Where to write the JSON report.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl ScenarioArgs {
    fn scenario(&self) -> qka_core::Result<ScenarioConfig> {
        let mut scenario = match &self.config {
            Some(path) => ScenarioConfig::load(path)?,
            None => ScenarioConfig::default(),
        };
        scenario.apply(&ScenarioOverrides {
            parties: self.parties,
            key_len: self.key_len,
            delta: self.delta,
            zeta: self.zeta,
            attack: self.attack.clone(),
            trials: self.trials,
            seed: self.seed,
            output_path: self.out.clone(),
        })?;
        scenario.validate()?;
        Ok(scenario)
    }
}

fn run(args: &ScenarioArgs) -> qka_core::Result<bool> {
    let scenario = args.scenario()?;
    let report = run_scenario(&scenario)?;
    print!("{}", render_report(&report));
    if let Some(path) = &scenario.output_path {
        write_json(&report, path)?;
    }
    Ok(report.passed)
}

fn oracle(args: &ScenarioArgs) -> qka_core::Result<bool> {
    let scenario = args.scenario()?;
    let table = oracle_table(scenario.attack.as_ref(), &scenario.protocol)?;
    print!("{}", render_oracle_table(&table));
    if let Some(path) = &scenario.output_path {
        write_json(&table, path)?;
    }
    Ok(true)
}

fn identities(out: Option<&PathBuf>) -> qka_core::Result<bool> {
    let report = verify_identities()?;
    print!("{}", render_identities(&report));
    if let Some(path) = out {
        write_json(&report, path)?;
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args),
        Command::Oracle(args) => oracle(args),
        Command::VerifyIdentities { out } => identities(out.as_ref()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_MISMATCH),
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                QkaError::Io { .. } => ExitCode::from(EXIT_IO),
                _ => ExitCode::from(EXIT_CONFIG),
            }
        }
    }
}
