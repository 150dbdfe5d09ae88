//! Command-line front end: batch compression with a file-level worker
//! pool, analyses with CSV output, and synthetic data generation.

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

pub mod args;
pub mod batch;
pub mod commands;

pub use args::{Cli, Command, Dims};
pub use batch::{compress_batch, decompress_batch, run_pool, CompressSummary, DecompressSummary, JobSpec};
pub use commands::run;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    /// At least one file or analysis failed.
    PartialFailure = 1,
    Usage = 2,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: expected {expected} bytes for the given dims and width, found {actual}", path.display())]
    SizeMismatch { path: PathBuf, expected: usize, actual: usize },
    #[error("{}: {source}", path.display())]
    Codec { path: PathBuf, source: ebzip::Error },
    #[error(transparent)]
    Analysis(#[from] ebzip::Error),
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Usage(_) => Status::Usage,
            _ => Status::PartialFailure,
        }
    }
}
