//! Command-line front end for the interdiction solver.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 input error, 3 nonconvergence,
//! 4 capacity exceeded.

mod check;
mod commands;
mod instance;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Solver(#[from] rmvci::Error),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use rmvci::Error as E;
        match self {
            CliError::Invariant(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Solver(e) => match e {
                E::Input(_) | E::InvalidMarginals { .. } => 2,
                E::NonConvergence { .. } | E::LpStatus(_) => 3,
                E::Capacity { .. } => 4,
                E::Structural(_) | E::Decomposition { .. } => 1,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "rmvci", version, about = "Randomized max-vertex-cover interdiction under matroid constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timings (makes reports run-dependent).
    #[arg(long, global = true)]
    pub timings: bool,
    /// Separation tolerance for the cutting-plane loops.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a leader strategy with its certified bounds.
    Solve {
        instance: PathBuf,
        /// Use the compact dual when both matroids are uniform; ignored otherwise.
        #[arg(long)]
        uniform_dual: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Approximate the follower's best response to the instance's strategy.
    Follower {
        instance: PathBuf,
        /// Take the strategy from a previous report instead of the instance.
        #[arg(long)]
        strategy_from: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Integrality gap of the relaxation on complete graphs.
    GapStudy {
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        step: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized invariant battery on an instance.
    Check {
        instance: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corrupt the effective weights before checking (negative control).
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Write the instance's marginal vector as a distribution over leader sets.
    Decompose {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exact optimal leader strategy by solving the full matrix game.
    Exact {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve {
            instance,
            uniform_dual,
            common,
        } => commands::solve(&echo, &instance, uniform_dual, &common),
        Command::Follower {
            instance,
            strategy_from,
            common,
        } => commands::follower(&echo, &instance, strategy_from.as_deref(), &common),
        Command::GapStudy { n_max, step, common } => commands::gap_study(&echo, n_max, step, &common),
        Command::Check {
            instance,
            trials,
            seed,
            inject_fault,
            common,
        } => check::run(&echo, &instance, trials, seed, inject_fault, &common),
        Command::Decompose { instance, common } => commands::decompose(&echo, &instance, &common),
        Command::Exact { instance, common } => commands::exact(&echo, &instance, &common),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
