//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration
//! error, 3 evaluation dominated by degenerate channels (more than 10% of
//! realizations skipped).

mod commands;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::beamforming::Architecture;
use crate::error::Error;
use crate::tiling::ArrayKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

/// Fraction of skipped realizations above which an evaluation fails.
pub const MAX_SKIPPED_FRACTION: f64 = 0.1;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "IRRARRAY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "irrarray", version, about = "Irregular phased-array generation and MU-MIMO evaluation")]
pub struct Cli {
    /// Worker threads (defaults to $IRRARRAY_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Size of a configuration space.
    Count {
        #[arg(value_parser = parse_kind)]
        kind: ArrayKind,
        rows: usize,
        cols: usize,
        /// Element count (thinned only).
        elements: Option<usize>,
        /// Also print scientific notation truncated to this many digits.
        #[arg(long)]
        digits: Option<usize>,
    },
    /// Tilings as newline-delimited JSON.
    Enumerate {
        #[arg(value_parser = parse_kind)]
        kind: ArrayKind,
        rows: usize,
        cols: usize,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random full-aperture thinned layouts as newline-delimited JSON.
    Sample {
        rows: usize,
        cols: usize,
        elements: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo report for one configuration.
    Evaluate {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        config: PathBuf,
        /// Restrict to these architectures (defaults to the scenario list).
        #[arg(long, value_delimiter = ',', value_parser = parse_arch)]
        arch: Vec<Architecture>,
        #[arg(long)]
        realizations: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Genetic search for the best layout of one kind.
    Optimize {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_parser = parse_kind)]
        kind: ArrayKind,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value = "fd", value_parser = parse_arch)]
        arch: Architecture,
        /// Also evaluate the whole space (at most 4096 layouts).
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum SE versus SNR for several configurations.
    Sweep {
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Configuration JSON files.
        configs: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', value_parser = parse_arch)]
        arch: Vec<Architecture>,
        #[arg(long)]
        realizations: Option<usize>,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> Result<ArrayKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_arch(s: &str) -> Result<Architecture, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::InvalidLayout(_) | Error::Scenario(_) | Error::Json(_) => EXIT_USAGE,
            Error::DegenerateChannel(_) | Error::Evaluation(_) => EXIT_DEGENERATE,
            _ => EXIT_FAILURE,
        };
        CliError { code, message: e.to_string() }
    }
}

fn configure_threads(requested: Option<usize>) -> Result<(), CliError> {
    let from_env = std::env::var(THREADS_ENV).ok();
    let n = match (requested, from_env) {
        (Some(n), _) => Some(n),
        (None, Some(v)) => Some(v.trim().parse::<usize>().map_err(|_| CliError {
            code: EXIT_USAGE,
            message: format!("{THREADS_ENV} must be a positive integer, got '{v}'"),
        })?),
        (None, None) => None,
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError { code: EXIT_USAGE, message: "thread count must be positive".into() });
        }
        // A pool may already exist when called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match configure_threads(cli.threads).and_then(|_| commands::dispatch(cli.command)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
