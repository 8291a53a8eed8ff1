//! `oped`: simulate sinograms, reconstruct by OPED or truncated SVD, verify
//! the singular value decomposition and report errors.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or configuration,
//! 3 numerical failure.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "oped", version, about = "Radon reconstruction by orthogonal polynomial expansion on the ball")]
struct Cli {
    /// Worker threads (falls back to OPED_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the Radon transform of a phantom on a scanning geometry.
    Simulate(SimulateArgs),
    /// Reconstruct a grid from a sinogram.
    Reconstruct(ReconstructArgs),
    /// Numerical checks of the singular value decomposition.
    SvdVerify(SvdVerifyArgs),
    /// Truncated-SVD reconstruction from a sinogram.
    SvdReconstruct(SvdReconstructArgs),
    /// Error metrics of a grid against a reference.
    Report(ReportArgs),
    /// Geometry summary and Lebesgue constant of a scan.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanArg {
    #[value(name = "I", alias = "i")]
    I,
    #[value(name = "II", alias = "ii")]
    II,
    /// Gegenbauer-Gauss offsets (any dimension).
    #[value(name = "gg")]
    Gg,
    /// Gegenbauer-Gauss offsets with the product rule on S^2.
    #[value(name = "3d")]
    ThreeD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    None,
    Eta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SummationArg {
    Pairwise,
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Oped,
    Svd,
}

/// A test object: a JSON file (phantom or polynomial) or a named preset.
#[derive(Debug, Clone, Args)]
pub struct ObjectArgs {
    /// Phantom or polynomial JSON file.
    #[arg(long, conflicts_with = "preset")]
    pub phantom: Option<PathBuf>,
    /// Preset: shepp-logan, unit-disk, unit-ball or poly_<k>.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Dimension (2 or 3); inferred from the phantom file or --type when omitted.
    #[arg(long)]
    pub d: Option<usize>,
    /// Scan type; defaults to II in the plane and 3d in space.
    #[arg(long = "type", value_enum)]
    pub scan: Option<ScanArg>,
    /// m for type I/II scans, n otherwise.
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub object: ObjectArgs,
    #[command(flatten)]
    pub scan: ScanArgs,
    /// Standard deviation of additive Gaussian noise (requires --seed).
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReferenceArgs {
    /// Reference phantom or polynomial file for error metrics.
    #[arg(long, conflicts_with = "reference_preset")]
    pub reference: Option<PathBuf>,
    /// Reference preset for error metrics.
    #[arg(long)]
    pub reference_preset: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonReconstructArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Expected order; must match the sinogram.
    #[arg(long)]
    pub order: Option<usize>,
    /// Expected scan type; must match the sinogram.
    #[arg(long = "type", value_enum)]
    pub scan: Option<ScanArg>,
    #[arg(long, default_value_t = 128)]
    pub resolution: usize,
    #[arg(long, value_enum, default_value_t = SummationArg::Pairwise)]
    pub summation: SummationArg,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    /// Also write an 8-bit PGM preview (middle slice in 3D).
    #[arg(long)]
    pub pgm: Option<PathBuf>,
    /// Print max Lebesgue function and runtime as JSON.
    #[arg(long)]
    pub diagnostics: bool,
    /// Also run the other algorithm and record the max difference.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub common: CommonReconstructArgs,
    #[arg(long, value_enum, default_value_t = FilterArg::None)]
    pub filter: FilterArg,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Oped)]
    pub algorithm: AlgorithmArg,
    /// Truncation degree for --algorithm svd (default: the scan's order).
    #[arg(long)]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SvdReconstructArgs {
    #[command(flatten)]
    pub common: CommonReconstructArgs,
    /// Truncation degree (default: the scan's order).
    #[arg(long)]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SvdVerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    /// Size of the (direction, offset) lattice for the pair residual.
    #[arg(long, default_value_t = 20)]
    pub lattice: usize,
    /// Basis functions per degree used to measure singular values.
    #[arg(long, default_value_t = 3)]
    pub gamma_samples: usize,
    /// Also write the report (and a manifest) to this file.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub grid: PathBuf,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    /// Reference grid file.
    #[arg(long, conflicts_with_all = ["reference", "reference_preset"])]
    pub reference_grid: Option<PathBuf>,
    /// Also write the report (and a manifest) to this file.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    /// Sinogram whose geometry is diagnosed; otherwise use --d/--type/--order.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[arg(long, value_enum, default_value_t = FilterArg::None)]
    pub filter: FilterArg,
    /// Grid resolution for the Lebesgue maximum.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
}

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var("OPED_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::invalid(format!("OPED_THREADS must be a positive integer, got {v:?}"))),
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            return Err(CliError::invalid("thread count must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::invalid(e.to_string()))?;
    }
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Reconstruct(a) => commands::reconstruct(&a.common, a.algorithm, a.filter, a.truncation),
        Command::SvdReconstruct(a) => commands::reconstruct(&a.common, AlgorithmArg::Svd, FilterArg::None, a.truncation),
        Command::SvdVerify(a) => commands::svd_verify(&a),
        Command::Report(a) => commands::report(&a),
        Command::Diagnose(a) => commands::diagnose(&a),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
