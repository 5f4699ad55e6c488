use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad input: wrong sizes, out-of-range parameters, malformed files.
    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical routine did not converge or produced non-finite values.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// An exhaustive search or generator ran out of budget.
    #[error("search failure: {0}")]
    Search(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn search(msg: impl Into<String>) -> Self {
        Error::Search(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the CLI: 1 for bad input, 2 for
    /// numerical or search failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::Search(_) => 2,
            _ => 1,
        }
    }
}
