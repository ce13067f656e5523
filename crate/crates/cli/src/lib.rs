//! Command-line front end for `abw-core`.
//!
//! The binary `abw` is a thin wrapper around [`run`]. Exit codes: 0 success,
//! 1 I/O or validation failure, 2 a failed identity or golden check, 3 a
//! solver that did not converge.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod experiment;
pub mod io;
pub mod plot;

#[derive(Debug, Parser)]
#[command(name = "abw", version, about = "Adapted Bures-Wasserstein distances and barycenters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// Displacement threshold for the barycenter iteration.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated weights, one per input; uniform when omitted.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<Method>,
    #[arg(long = "classical-compare", global = true)]
    pub classical_compare: bool,
    #[arg(long = "check-decomposition", global = true)]
    pub check_decomposition: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Method {
    #[default]
    FixedPoint,
    Columns,
    #[value(name = "oracle-1d")]
    Oracle1d,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distances between two process files.
    Distance { first: PathBuf, second: PathBuf },
    /// Barycenter of one or more process files.
    Barycenter {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Process file of an AR(1) specification.
    Ar1 { spec: PathBuf },
    /// Sample paths of a process as CSV.
    Simulate {
        process: PathBuf,
        #[arg(long, default_value_t = 1000)]
        paths: usize,
    },
    /// Reproduce one of the bundled experiments.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Sec5,
    Sec6,
}

/// Failure carrying the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn check_failed(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn not_converged(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<abw_core::AbwError> for CliError {
    fn from(e: abw_core::AbwError) -> Self {
        Self::invalid(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Sizes the global worker pool from `ABW_THREADS` (unset or 0 keeps the
/// default).
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("ABW_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::invalid(format!("ABW_THREADS: expected a non-negative integer, got {raw:?}")))?;
    if threads > 0 {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> CliResult<()> {
    let opts = &cli.options;
    match cli.command {
        Command::Distance { first, second } => commands::distance(&first, &second, opts),
        Command::Barycenter { inputs } => commands::barycenter(&inputs, opts),
        Command::Ar1 { spec } => commands::ar1(&spec, opts),
        Command::Simulate { process, paths } => commands::simulate(&process, paths, opts),
        Command::Experiment { name } => {
            let dir = opts.out.clone().unwrap_or_else(|| match name {
                ExperimentName::Sec5 => PathBuf::from("results/sec5"),
                ExperimentName::Sec6 => PathBuf::from("results/sec6"),
            });
            match name {
                ExperimentName::Sec5 => experiment::sec5(&dir, opts).map(|_| ()),
                ExperimentName::Sec6 => experiment::sec6(&dir, opts).map(|_| ()),
            }
        }
    }
}
