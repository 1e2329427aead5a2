use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("solver failure: {0}")]
    Solver(#[from] relaxcouple_core::Error),
    #[error("malformed table: {0}")]
    Parse(String),
}

impl RunError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        RunError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for configuration and file problems, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Solver(relaxcouple_core::Error::Config(_)) => 1,
            RunError::Solver(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;
