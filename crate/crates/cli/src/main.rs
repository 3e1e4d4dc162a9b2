//! `tvcert`: certificate checks and TV reconstruction experiments.
//!
//! Exit codes: 0 success, 1 other failure, 2 configuration error,
//! 3 ill-conditioned Gram system, 4 verdict failure, 5 solver not converged.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod grid;
mod output;
mod radial;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Config;

#[derive(Debug, Parser)]
#[command(
    name = "tvcert",
    version,
    about = "Dual certificates and TV reconstruction for radial images"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps and multi-seed runs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Omit timestamps so reruns are byte-identical.
    #[arg(long, global = true)]
    pub reproducible: bool,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Meaning of kernel width values: `std` (default) or `variance`.
    #[arg(long, global = true)]
    pub sigma_convention: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the non-degenerate source condition for one sigma.
    Certify(radial::CertifyArgs),
    /// Certify over a list of sigmas.
    Sweep(radial::SweepArgs),
    /// Dump eta_v and f_v profiles.
    Profile(radial::ProfileArgs),
    /// Circle spectrum of the second shape derivative.
    Stability(radial::StabilityArgs),
    /// Simulate, solve and analyze a TV reconstruction.
    Reconstruct(grid::ReconstructArgs),
    /// Discrete dual norm of a rasterized certificate.
    Gnorm(grid::GnormArgs),
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(tvcert::Error),
    /// The computation finished but the verdict is negative.
    Verdict(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                tvcert::Error::InvalidInput(_) | tvcert::Error::InvalidDims(_) | tvcert::Error::InvalidSegment(_) => 2,
                tvcert::Error::Conditioning { .. } => 3,
                tvcert::Error::NotConverged { .. } => 5,
                _ => 1,
            },
            CliError::Verdict(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Verdict(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<tvcert::Error> for CliError {
    fn from(e: tvcert::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Settings shared by every command after merging flags and config.
pub struct Context {
    pub config: Config,
    pub out: PathBuf,
    pub reproducible: bool,
    pub convention: tvcert::WidthConvention,
}

const GLOBAL_KEYS: [&str; 4] = ["out", "jobs", "reproducible", "sigma-convention"];

fn run(cli: Cli) -> Result<(), CliError> {
    let config = Config::load(cli.global.config.as_deref())?;
    let allowed: Vec<&str> = GLOBAL_KEYS
        .iter()
        .chain(match &cli.command {
            Command::Certify(_) => radial::CERTIFY_KEYS,
            Command::Sweep(_) => radial::SWEEP_KEYS,
            Command::Profile(_) => radial::PROFILE_KEYS,
            Command::Stability(_) => radial::STABILITY_KEYS,
            Command::Reconstruct(_) => grid::RECONSTRUCT_KEYS,
            Command::Gnorm(_) => grid::GNORM_KEYS,
        })
        .copied()
        .collect();
    config.check_keys(&allowed)?;

    let jobs: Option<usize> = config.get("jobs", cli.global.jobs)?;
    if let Some(jobs) = jobs {
        if jobs == 0 {
            return Err(CliError::Config("jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let convention = config
        .get::<String>("sigma-convention", cli.global.sigma_convention.clone())?
        .map(|s| s.parse::<tvcert::WidthConvention>())
        .transpose()
        .map_err(|e| CliError::Config(e.to_string()))?
        .unwrap_or_default();
    let ctx = Context {
        out: config.get_or("out", cli.global.out.clone(), PathBuf::from("out"))?,
        reproducible: config.flag("reproducible", cli.global.reproducible)?,
        convention,
        config,
    };
    std::fs::create_dir_all(&ctx.out)?;

    match &cli.command {
        Command::Certify(a) => radial::certify(&ctx, a),
        Command::Sweep(a) => radial::sweep(&ctx, a),
        Command::Profile(a) => radial::profile(&ctx, a),
        Command::Stability(a) => radial::stability(&ctx, a),
        Command::Reconstruct(a) => grid::reconstruct(&ctx, a),
        Command::Gnorm(a) => grid::gnorm(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tvcert: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
