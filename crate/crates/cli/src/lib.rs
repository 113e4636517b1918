//! Batch driver for `qframe` experiments.
//!
//! Each subcommand reads an optional TOML config, applies command-line overrides,
//! runs, and writes a result document (see [`output`]). Exit statuses are listed
//! on [`CliError::exit_code`].

pub mod commands;
pub mod config;
pub mod output;
pub mod plot;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qframe_core::povm::Solid;

pub const ENV_THREADS: &str = "QFRAME_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error("{0}")]
    Cap(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 parse, 3 validation, 4 self-check, 5 enumeration cap, 1 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::SelfCheck(_) => 4,
            CliError::Cap(_) => 5,
        }
    }
}

impl From<qframe_core::Error> for CliError {
    fn from(e: qframe_core::Error) -> Self {
        match e {
            qframe_core::Error::EnumerationCapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qframe",
    version,
    about = "Frame-theoretic qubit tomography and detection experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a POVM: positivity, completeness, informational completeness, tightness.
    Verify(VerifyArgs),
    /// Monte Carlo reconstruction error over a grid of solids and ensemble sizes.
    Estimate(EstimateArgs),
    /// Likelihood-ratio operating characteristics for binary state detection.
    Qdoc(QdocArgs),
    /// Probability of error over sampled orientations of each solid.
    OrientSweep(OrientSweepArgs),
    /// Second moments of multinomial frequency deviations.
    Moments(MomentsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Toml,
}

/// A solid by name (`cube`) or vertex count (`8`).
pub fn parse_solid(s: &str) -> Result<Solid, String> {
    if let Ok(m) = s.parse::<usize>() {
        return Solid::from_vertex_count(m).ok_or_else(|| format!("no solid with {m} vertices"));
    }
    Solid::ALL
        .into_iter()
        .find(|x| x.name() == s)
        .ok_or_else(|| format!("unknown solid `{s}`"))
}

/// Exactly `N` comma-separated numbers.
pub fn parse_array<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_solid)]
    pub solid: Option<Solid>,
    /// Quaternion `w,x,y,z`.
    #[arg(long = "rotate", value_parser = parse_array::<4>, allow_negative_numbers = true)]
    pub rotation: Option<[f64; 4]>,
    /// Euler angles `roll,pitch,yaw` in radians.
    #[arg(long, value_parser = parse_array::<3>, allow_negative_numbers = true)]
    pub euler: Option<[f64; 3]>,
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// TOML POVM document with explicit element matrices.
    #[arg(long)]
    pub povm_file: Option<PathBuf>,
    /// Write the POVM as a TOML document.
    #[arg(long)]
    pub export: Option<PathBuf>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', value_parser = parse_solid)]
    pub solids: Option<Vec<Solid>>,
    #[arg(long, value_delimiter = ',')]
    pub shots: Option<Vec<u64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long = "rotate", value_parser = parse_array::<4>, allow_negative_numbers = true)]
    pub rotation: Option<[f64; 4]>,
    #[arg(long, value_parser = parse_array::<3>, allow_negative_numbers = true)]
    pub euler: Option<[f64; 3]>,
    /// Use `p` itself as the relative frequency in every trial.
    #[arg(long)]
    pub force_exact_frequencies: bool,
    /// Fail when a cell's mean is further than `--self-check-sigma` SE from the prediction.
    #[arg(long)]
    pub self_check: bool,
    #[arg(long)]
    pub self_check_sigma: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Polar angle of a pure state.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Bloch vector `x,y,z`.
    #[arg(long, value_parser = parse_array::<3>, allow_negative_numbers = true, conflicts_with_all = ["theta", "phi"])]
    pub bloch: Option<[f64; 3]>,
}

#[derive(Debug, Args)]
pub struct HypothesisArgs {
    /// `rho0` as pure-state angles `theta,phi`.
    #[arg(long, value_parser = parse_array::<2>, allow_negative_numbers = true)]
    pub rho0_angles: Option<[f64; 2]>,
    #[arg(long, value_parser = parse_array::<3>, allow_negative_numbers = true, conflicts_with = "rho0_angles")]
    pub rho0_bloch: Option<[f64; 3]>,
    #[arg(long, value_parser = parse_array::<2>, allow_negative_numbers = true)]
    pub rho1_angles: Option<[f64; 2]>,
    #[arg(long, value_parser = parse_array::<3>, allow_negative_numbers = true, conflicts_with = "rho1_angles")]
    pub rho1_bloch: Option<[f64; 3]>,
    /// Prior probability of `H0`.
    #[arg(long)]
    pub q0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct QdocArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', value_parser = parse_solid)]
    pub solids: Option<Vec<Solid>>,
    #[arg(long, value_delimiter = ',')]
    pub shots: Option<Vec<u64>>,
    #[command(flatten)]
    pub hypothesis: HypothesisArgs,
    #[arg(long = "rotate", value_parser = parse_array::<4>, allow_negative_numbers = true)]
    pub rotation: Option<[f64; 4]>,
    #[arg(long, value_parser = parse_array::<3>, allow_negative_numbers = true)]
    pub euler: Option<[f64; 3]>,
    #[arg(long)]
    pub enumeration_cap: Option<u64>,
    #[arg(long)]
    pub monte_carlo_fallback: bool,
    /// Add Monte Carlo rows and exact rows on the shared threshold grid.
    #[arg(long)]
    pub compare_monte_carlo: bool,
    #[arg(long)]
    pub monte_carlo_samples: Option<usize>,
    /// Add upper concave envelope rows.
    #[arg(long)]
    pub envelope: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// SVG file for the curves.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OrientSweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', value_parser = parse_solid)]
    pub solids: Option<Vec<Solid>>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[command(flatten)]
    pub hypothesis: HypothesisArgs,
    /// Fibonacci axes in the rotation grid.
    #[arg(long)]
    pub axes: Option<usize>,
    /// Spin angles per axis.
    #[arg(long)]
    pub angles: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Outcome probabilities.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long)]
    pub shots: Option<u64>,
    /// Element traces; adds coefficient-error columns.
    #[arg(long, value_delimiter = ',')]
    pub traces: Option<Vec<f64>>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify(a) => commands::verify(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Qdoc(a) => commands::qdoc(a),
        Command::OrientSweep(a) => commands::orient_sweep(a),
        Command::Moments(a) => commands::moments(a),
    }
}

/// Thread count from [`ENV_THREADS`], if set.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(ENV_THREADS) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Parse(format!(
                "{ENV_THREADS} must be a positive integer, got `{v}`"
            ))),
        },
    }
}
