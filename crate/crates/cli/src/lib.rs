//! Library side of the `congame` command-line tool.

pub mod config;
pub mod region;
pub mod run;
pub mod svg;

use std::fmt;

pub use config::{GameKind, RunArgs, RunConfig};
pub use region::{analyze_region, RegionArgs};
pub use run::{run, RunOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE_START: i32 = 3;
pub const EXIT_TARGET_MISSED: i32 = 4;
pub const EXIT_INTERNAL: i32 = 1;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn infeasible(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INFEASIBLE_START, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INTERNAL, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::internal(format!("i/o error: {e}"))
    }
}
