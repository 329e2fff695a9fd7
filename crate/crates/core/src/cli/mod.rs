//! Command-line front end: argument definitions, run configuration and the
//! drivers behind each subcommand. The binary only parses arguments, installs
//! the Ctrl-C handler and calls [`run`].

mod commands;
mod config;

use std::path::PathBuf;
use std::sync::atomic::AtomicBool;

use clap::{Parser, Subcommand};

pub use commands::{observables_for, Observables, Outcome};
pub use config::{ModelSource, ObservableSpec, PortraitSpec, PrepSpec, RunConfig, ScanSpec};

use crate::ccsolver::CcError;
use crate::potential::{CalibrationError, PotentialError};
use crate::scan::ScanError;
use crate::stereo::StereoError;

/// Environment variable that overrides the worker budget.
pub const WORKERS_ENV: &str = "STEREODYN_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "stereodyn", version, about = "Coupled-channel rotor scattering and stereodynamical observables")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration file.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `[run] output`.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = one per core); overrides `[run] workers`.
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Validate the configuration and print the plan without computing.
    #[arg(long, global = true)]
    pub dry_run: bool,
    /// More logging (-v info, -vv debug).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Energy scan with resonance analysis: scan.csv, resonances.txt.
    Scan,
    /// S-matrices at the configured energies: one smatrix_<E>K.txt each.
    Smatrix,
    /// Polarization moments and DCSs: moments.csv, dcs.csv.
    Observables,
    /// Axis-distribution portraits from a moments table: portrait_<j>to<jp>.csv.
    Portrait,
    /// Surrogate potential search: calibration.txt, calibrated.pot.
    Calibrate,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}{}: {message}", path.display(), line.map(|l| format!(": line {l}")).unwrap_or_default())]
    Config { path: PathBuf, line: Option<usize>, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Solver(#[from] CcError),
    #[error(transparent)]
    Stereo(#[from] StereoError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything that failed at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            _ => 1,
        }
    }
}

/// Loads the configuration named in `args`, applies the overrides and runs
/// the subcommand on a pool of the requested size.
pub fn run(args: &Args, cancel: &AtomicBool) -> Result<Outcome, CliError> {
    let Some(path) = &args.config else {
        return Err(CliError::Config { path: PathBuf::from("<none>"), line: None, message: "--config is required".into() });
    };
    let mut cfg = RunConfig::load(path)?;
    if let Some(out) = &args.out {
        cfg.output = out.clone();
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cfg.check_output()?;
    if args.dry_run {
        print!("{}", commands::plan(&cfg, args.command));
        return Ok(Outcome::default());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    pool.install(|| commands::dispatch(&cfg, args.command, cancel))
}
