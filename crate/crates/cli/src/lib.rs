//! Command-line front end for `flakelab`: builds spaces, runs the solvers
//! and certificates, and drives the acceptance suite.
//!
//! Exit statuses: 0 success, 1 an acceptance criterion failed, 2 usage,
//! 3 mathematical precondition, 4 I/O, 5 solver failure.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod suite;

use std::path::PathBuf;

use flakelab::{ErrorKind, LabError};
use thiserror::Error;

pub use args::Cli;
pub use config::ExperimentConfig;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FLAKELAB_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lab(#[from] LabError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("acceptance criteria failed: {}", .0.join(", "))]
    CriteriaFailed(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lab(e) => match e.kind() {
                ErrorKind::Precondition => 3,
                ErrorKind::Io => 4,
                ErrorKind::Solver => 5,
            },
            CliError::Io { .. } | CliError::Parse { .. } => 4,
            CliError::Usage(_) => 2,
            CliError::CriteriaFailed(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Runs one parsed invocation.
pub fn run(cli: Cli) -> Result<()> {
    commands::dispatch(cli)
}
