use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Solver(#[from] lam_core::Error),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("problem `{problem}` cannot be checked: {reason}")]
    Unverifiable { problem: String, reason: String },

    #[error("{0}")]
    Usage(String),

    #[error("cannot read config file {path}: {source}")]
    Config {
        path: PathBuf,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

impl HarnessError {
    pub(crate) fn write(path: impl Into<PathBuf>, source: impl std::error::Error + Send + Sync + 'static) -> Self {
        HarnessError::Write {
            path: path.into(),
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
