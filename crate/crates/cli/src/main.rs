//! `ergopt`: batch front end for the `ergopt` library.
//!
//! Exit codes: 0 success, 1 internal error, 2 configuration or validation
//! error, 3 verification failure. Reports go to stdout as JSON; errors go to
//! stderr as JSON.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value as Json};

use config::ExperimentConfig;

#[derive(Debug)]
pub enum CliError {
    Config { field: String, message: String },
    Core(ergopt::Error),
    Internal(String),
}

impl CliError {
    pub fn config(field: &str, message: impl ToString) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    fn exit_code(&self) -> u8 {
        use ergopt::Error as E;
        match self {
            CliError::Config { .. } => 2,
            CliError::Core(e) => match e {
                E::OrbitNotGoodEnough { .. } | E::Infeasible(_) => 3,
                E::KindMismatch { .. }
                | E::InvalidSystem(_)
                | E::InvalidPoint(_)
                | E::InadmissibleWord { .. }
                | E::IncompatibleObservable(_)
                | E::NonPositiveWeight(_)
                | E::PseudoOrbitViolation { .. }
                | E::EtaTooLarge { .. }
                | E::CapExceeded { .. }
                | E::EmptySet
                | E::BudgetViolation(_)
                | E::Parse(_)
                | E::Unsupported(_) => 2,
                _ => 1,
            },
            CliError::Internal(_) => 1,
        }
    }

    fn to_json(&self) -> Json {
        match self {
            CliError::Config { field, message } => json!({"error": "config", "field": field, "message": message}),
            CliError::Core(e) => json!({"error": "core", "kind": format!("{e:?}").split([' ', '(', '{']).next(), "message": e.to_string()}),
            CliError::Internal(m) => json!({"error": "internal", "message": m}),
        }
    }
}

impl From<ergopt::Error> for CliError {
    fn from(e: ergopt::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Enumerate,
    Beta,
    Subaction,
    Shadow,
    Construct,
    Perturb,
    Verify,
    BqScan,
    Pipeline,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Beta => "beta",
            Command::Subaction => "subaction",
            Command::Shadow => "shadow",
            Command::Construct => "construct",
            Command::Perturb => "perturb",
            Command::Verify => "verify",
            Command::BqScan => "bq-scan",
            Command::Pipeline => "pipeline",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ergopt", version, about = "Periodic minimizing orbits for weighted ergodic optimization")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set epsilon=1/20` or `--set system.k=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Directory for the JSON report and CSV tables.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed; overrides `seed` in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

fn write_artifacts(dir: &Path, name: &str, report: &str, tables: &[(String, String)]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Internal(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join(format!("{name}.json")), report).map_err(io)?;
    for (table, body) in tables {
        std::fs::write(dir.join(format!("{table}.csv")), body).map_err(io)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = ExperimentConfig::load(cli.config.as_deref(), &cli.overrides, cli.seed)?;
    let outcome = match cli.command {
        Command::Enumerate => commands::enumerate(&cfg),
        Command::Beta => commands::beta(&cfg),
        Command::Subaction => commands::subaction(&cfg),
        Command::Shadow => commands::shadow_cmd(&cfg),
        Command::Construct => commands::construct(&cfg),
        Command::Perturb => commands::perturb(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::BqScan => commands::bq_scan_cmd(&cfg),
        Command::Pipeline => commands::pipeline(&cfg),
    }?;
    let system = cfg.system().ok().map(|s| s.to_json());
    let report = json!({
        "command": cli.command.name(),
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "versions": { "ergopt": env!("CARGO_PKG_VERSION") },
        "config": cfg.json(),
        "system": system,
        "pass": outcome.pass,
        "result": outcome.result,
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Internal(e.to_string()))? + "\n";
    if let Some(dir) = &cli.out {
        write_artifacts(dir, cli.command.name(), &text, &outcome.tables)?;
    }
    print!("{text}");
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
