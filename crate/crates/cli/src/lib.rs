//! Command-line driver for the `allroots` solver: configuration files,
//! solution output, contour dumps and scaling sweeps.

use std::io;
use std::path::PathBuf;

use allroots::SolveError;
use thiserror::Error;

pub mod config;
pub mod contours;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{load_config, parse_config, OutputFormat, RunConfig};
pub use contours::dump_contours;
pub use output::{format_number, read_csv, write_solutions, Timing};
pub use run::{run, run_to};
pub use sweep::{scaling_sweep, separable_quadratic, SweepConfig, SweepOutcome, SweepRow};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl CliError {
    /// 2 for configuration problems, 3 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Parse(_) | CliError::Config { .. } | CliError::Solve(_) => EXIT_CONFIG,
        }
    }
}
