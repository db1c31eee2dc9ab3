//! `ugame` — reproduce the guessing-game tables and run the library from the shell.
//!
//! Exit codes: 0 success, 2 invalid input, 1 internal failure.

mod commands;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "ugame", version, about = "Guessing-game simulator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Qubit game: closed-form optimum and noisy-model prediction versus coherence.
    CurveD2 {
        /// Register coherence values (repeat or comma-separate).
        #[arg(long, value_delimiter = ',')]
        gamma: Vec<f64>,
        /// Add the published sweep points.
        #[arg(long)]
        paper_points: bool,
        /// Interlayer visibility for the model column.
        #[arg(long, default_value_t = 0.99)]
        v: f64,
    },
    /// Qutrit game: predictions for the published waveplate strategies.
    Table2,
    /// Click probabilities of the three-mode Fourier mesh for Fourier probes.
    Fourier {
        /// Interferometer visibility (also accepted as --v).
        #[arg(value_name = "V")]
        v_pos: Option<f64>,
        #[arg(long = "v", conflicts_with = "v_pos")]
        v: Option<f64>,
    },
    /// Compile a unitary (JSON rows of [re, im]) into a beam-splitter mesh.
    Decompose { matrix: PathBuf },
    /// Maximize the guessing probability for dimension D.
    Optimize {
        d: usize,
        #[arg(value_name = "GAMMA")]
        gamma_pos: Option<f64>,
        #[arg(long = "gamma", conflicts_with = "gamma_pos")]
        gamma: Option<f64>,
        /// Strategy name: analytic-d2, seesaw-nm, seesaw-eigen.
        #[arg(long, default_value = "seesaw-nm")]
        method: String,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Noisy detection table for a JSON run description.
    Simulate { config: PathBuf },
    /// Register coherence of a measured qubit state (JSON rows of [re, im]).
    EstimateGamma {
        state: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Internal(String),
}

impl CliError {
    pub fn validation(e: impl fmt::Display) -> Self {
        Self::Validation(e.to_string())
    }

    pub fn internal(e: impl fmt::Display) -> Self {
        Self::Internal(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 2,
            Self::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Validation(m) => write!(f, "invalid input: {m}"),
            Self::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<ugame::Error> for CliError {
    fn from(e: ugame::Error) -> Self {
        match e {
            ugame::Error::NonFinite => Self::Internal(e.to_string()),
            other => Self::Validation(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = ugame::parallel::threads_from_env()?;
    let report = ugame::parallel::run_with_threads(threads, || match cli.command {
        Command::CurveD2 { gamma, paper_points, v } => commands::curve_d2(&gamma, paper_points, v),
        Command::Table2 => commands::table2(),
        Command::Fourier { v_pos, v } => commands::fourier(v_pos.or(v).unwrap_or(0.98)),
        Command::Decompose { matrix } => commands::decompose(&matrix),
        Command::Optimize {
            d,
            gamma_pos,
            gamma,
            method,
            restarts,
            seed,
        } => {
            let gamma = gamma_pos
                .or(gamma)
                .ok_or_else(|| CliError::validation("optimize needs GAMMA (positional or --gamma)"))?;
            commands::optimize(d, gamma, &method, restarts, seed, threads)
        }
        Command::Simulate { config } => commands::simulate(&config),
        Command::EstimateGamma { state, step } => commands::estimate_gamma(&state, step),
    })??;
    report.emit(cli.common.format, cli.common.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ugame: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
