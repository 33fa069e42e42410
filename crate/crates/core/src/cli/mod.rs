//! Command-line front end: one subcommand per experiment, CSV on output.

mod commands;
pub mod csv;
pub mod values;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

pub use commands::run_command;

#[derive(Debug, Parser)]
#[command(
    name = "cyclo-bounds",
    version,
    about = "Synchronous MMSE bounds for cyclostationary PAM in white noise"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CL and KL power spectral densities and their decreasing rearrangements
    Spectra(CommonArgs),
    /// Representation entropy of the KL and CL spectra over a delay sweep
    Entropy(CommonArgs),
    /// Synchronous and WSS MMSE of smoothing, causal filtering and prediction
    Mmse(CommonArgs),
    /// MMSE times SNR against the high-SNR asymptotes
    Highsnr(CommonArgs),
    /// Inverse synchronous gains over a delay sweep
    Syncgain(CommonArgs),
    /// Monte Carlo smoothing MSE of the cyclic Wiener filter
    Simulate(SimulateArgs),
    /// Finite-order one-step prediction MMSE against the asymptotic bound
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Cycle period P in samples
    #[arg(long, default_value_t = 4)]
    pub period: usize,

    /// Maximum delay: list, start:step:stop, fractions allowed (e.g. 4/3)
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,

    /// Noise power Pz (list or range)
    #[arg(long, group = "noise", allow_hyphen_values = true)]
    pub noise_power: Option<String>,

    /// Linear SNR = 1/Pz (list or range)
    #[arg(long, group = "noise", allow_hyphen_values = true)]
    pub snr: Option<String>,

    /// SNR in dB (list or range)
    #[arg(long, group = "noise", allow_hyphen_values = true)]
    pub snr_db: Option<String>,

    /// Quadrature nodes per sub-band
    #[arg(long, default_value_t = crate::spectral::DEFAULT_POINTS_PER_SUBBAND)]
    pub grid_points: usize,

    /// Master seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Output file (stdout when absent)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Samples per realization
    #[arg(long, default_value_t = 1 << 20)]
    pub samples: usize,

    /// Independent realizations per SNR
    #[arg(long, default_value_t = 1)]
    pub trials: usize,

    /// Write the first observation as interleaved little-endian f64 I/Q
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Largest predictor order
    #[arg(long, default_value_t = 64)]
    pub max_order: usize,
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Spectra(c)
            | Command::Entropy(c)
            | Command::Mmse(c)
            | Command::Highsnr(c)
            | Command::Syncgain(c) => c,
            Command::Simulate(s) => &s.common,
            Command::Predict(p) => &p.common,
        }
    }
}

/// Failure classes with distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(msg) => CliError::Config(msg),
            Error::UnsupportedDelay { delta } => {
                CliError::Config(format!("delta = {delta} is not supported here; use 0"))
            }
            Error::TooFewNodes { min, got } => {
                CliError::Config(format!("at least {min} grid points needed, got {got}"))
            }
            Error::Io(io) => CliError::Io(io),
            other => CliError::Numerical(other),
        }
    }
}

/// Runs a parsed command and writes its CSV.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let text = run_command(&cli.command)?;
    match &cli.command.common().output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
