use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[source] spinlimit_core::Error),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl AppError {
    pub fn config(msg: impl Into<String>) -> Self {
        AppError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: impl Into<io::Error>) -> Self {
        AppError::Io { path: path.into(), source: source.into() }
    }

    /// 2 for configuration problems, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Numerical(_) => 3,
            AppError::Io { .. } => 4,
        }
    }
}

impl From<spinlimit_core::Error> for AppError {
    fn from(e: spinlimit_core::Error) -> Self {
        if e.is_numerical() {
            AppError::Numerical(e)
        } else {
            AppError::Config(e.to_string())
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
