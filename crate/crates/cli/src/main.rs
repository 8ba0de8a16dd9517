//! Command-line front end for the windflow stochastic SOC-ACOPF toolkit.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable, malformed or inconsistent input (exit 2).
    Input(anyhow::Error),
    /// A conic solve failed or returned a non-optimal status (exit 3).
    Solver(anyhow::Error),
    /// Decomposition hit its iteration limit (exit 4).
    NonConverged(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Solver(_) => 3,
            Failure::NonConverged(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "input error: {e:#}"),
            Failure::Solver(e) => write!(f, "solver error: {e:#}"),
            Failure::NonConverged(msg) => write!(f, "not converged: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "windflow", version, about = "Stochastic SOC-ACOPF for hybrid AC/DC grids with wind")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpfModel {
    Soc,
    Dc,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Single,
    SerialBda,
    ParallelBda,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Weibull,
    Rayleigh,
}

#[derive(Subcommand)]
enum Command {
    /// Deterministic OPF with its AC feasibility gap report.
    RunOpf {
        case: PathBuf,
        #[arg(long, value_enum, default_value = "soc")]
        model: OpfModel,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fits a wind-speed distribution and writes joint farm scenarios.
    GenScenarios {
        #[arg(long)]
        case: PathBuf,
        /// Wind-speed samples, one per line or first CSV column, m/s.
        #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
        measurements: Option<PathBuf>,
        /// Draws samples from a Weibull distribution: SHAPE SCALE COUNT.
        #[arg(long, num_args = 3, value_names = ["SHAPE", "SCALE", "COUNT"])]
        synthetic: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "weibull")]
        family: Family,
        /// Directory of `<model>.csv` power curves.
        #[arg(long)]
        curves: PathBuf,
        /// Scenarios per farm; one value applies to every farm.
        #[arg(long, value_delimiter = ',', required = true)]
        per_farm: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solves the two-stage stochastic problem.
    Solve {
        case: PathBuf,
        scenarios: PathBuf,
        #[arg(long, value_enum, default_value = "single")]
        method: SolveMethod,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Scenario blocks; defaults to the worker count.
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long, default_value_t = 0.02)]
        gap: f64,
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Value of the stochastic solution against the mean-wind dispatch.
    Vss {
        case: PathBuf,
        scenarios: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RunOpf { case, model, out } => commands::run_opf(&case, model, &out),
        Command::GenScenarios {
            case,
            measurements,
            synthetic,
            family,
            curves,
            per_farm,
            seed,
            out,
        } => commands::gen_scenarios(commands::ScenarioArgs {
            case,
            measurements,
            synthetic,
            family,
            curves,
            per_farm,
            seed,
            out,
        }),
        Command::Solve {
            case,
            scenarios,
            method,
            workers,
            blocks,
            gap,
            max_iter,
            out,
        } => commands::solve(commands::SolveArgs {
            case,
            scenarios,
            method,
            workers,
            blocks,
            gap,
            max_iter,
            out,
        }),
        Command::Vss { case, scenarios, out } => commands::vss(&case, &scenarios, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("windflow: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
