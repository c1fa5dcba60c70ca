use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] qrecon_core::Error),

    /// One or more validation checks missed their tolerance.
    #[error("{0} validation check(s) failed")]
    Validation(usize),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 0 success, 1 usage, 2 numerical or instability, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        use qrecon_core::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(E::Parameter(_) | E::Contract(_)) => 1,
            CliError::Core(_) | CliError::Validation(_) => 2,
            CliError::Io { .. } | CliError::Csv(_) | CliError::Json(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
