//! Shared error type for the whole engine.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file: bad header, unparseable field, wrong row shape.
    #[error("parse: {file}:{line}: {message}")]
    Parse {
        file: String,
        line: u64,
        message: String,
    },

    /// Input violates a data contract (asymmetric pair, missing coverage,
    /// inconsistent firm attributes, out-of-range value).
    #[error("input: {0}")]
    Validation(String),

    /// Numerical failure: non-convergence, rank deficiency, separation,
    /// empty sample, zero variance.
    #[error("numerical: {0}")]
    Numerical(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(file: impl Into<String>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }
}
