//! `mpf-lab`: experiment runner for multi-product-formula Hamiltonian
//! simulation. Emits headered CSV/JSON with the resolved configuration and
//! seed, reproducible bit-for-bit for a fixed `(config, seed)`.
//!
//! Exit codes: 0 success, 2 usage error, 3 capacity exceeded, 4 numerical
//! failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SEED_ENV: &str = "MPF_LAB_SEED";

#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    pub fn capacity(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 3,
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 4,
        }
    }
}

impl From<mpf_core::Error> for CliError {
    fn from(err: mpf_core::Error) -> Self {
        use mpf_core::Error as E;
        let code = match &err {
            E::InvalidInput(_) | E::Unsupported(_) => 2,
            E::Capacity(_) => 3,
            E::Numerical(_) | E::Internal(_) | E::BudgetExceeded(_) => 4,
        };
        Self {
            message: err.to_string(),
            code,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self {
            message: format!("io error: {err}"),
            code: 4,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mpf-lab",
    version,
    about = "Well-conditioned multi-product formulas for Hamiltonian simulation"
)]
struct Cli {
    /// Seed for stochastic subcommands (flag > config > MPF_LAB_SEED > 1)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Flat key=value config file; command-line flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path (stdout when omitted)
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve extrapolation weights for a Trotter-exponent sequence
    Weights(commands::WeightsArgs),
    /// Five-spin Ising magnetization sweep with classical combinations
    IsingDemo(commands::IsingDemoArgs),
    /// Ill-conditioned Bernoulli sampling demonstration
    BernoulliDemo(commands::BernoulliArgs),
    /// Synthetic zero-noise-extrapolation round trip
    ZneDemo(commands::ZneArgs),
    /// CNOT accounting: LCU versus classical combination
    LcuCost(commands::LcuCostArgs),
    /// Factorial / Lambert-W depth scaling estimate
    Scaling(commands::ScalingArgs),
    /// Spin-boson repetition counts to reach target accuracies
    Repetitions(commands::RepetitionsArgs),
    /// Enumerate well-conditioned exponent sequences
    Search(commands::SearchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let seed = resolve_seed(cli.seed, &config)?;

    let rendered = match cli.command {
        Command::Weights(args) => commands::weights(args, &config, seed)?,
        Command::IsingDemo(args) => commands::ising_demo(args, &config, seed)?,
        Command::BernoulliDemo(args) => commands::bernoulli_demo(args, &config, seed)?,
        Command::ZneDemo(args) => commands::zne_demo(args, &config, seed)?,
        Command::LcuCost(args) => commands::lcu_cost(args, &config, seed)?,
        Command::Scaling(args) => commands::scaling(args, &config, seed)?,
        Command::Repetitions(args) => commands::repetitions(args, &config, seed)?,
        Command::Search(args) => commands::search(args, &config, seed)?,
    };

    match &cli.output {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn resolve_seed(flag: Option<u64>, config: &Config) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    if let Some(seed) = config.get::<u64>("seed")? {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw
            .parse::<u64>()
            .map_err(|_| CliError::usage(format!("{SEED_ENV}='{raw}' is not a valid seed"))),
        Err(_) => Ok(1),
    }
}

/// First line of every output: `# mpf-lab v<semver> seed=<n>`.
pub fn csv_banner(seed: u64) -> String {
    format!("# mpf-lab v{VERSION} seed={seed}\n")
}
