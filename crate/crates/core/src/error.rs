//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, computation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument to an operation (out-of-range dims, bad weights, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Shape or length mismatch between related inputs.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A numerical procedure failed (singular system, non-convergence, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Degenerate input for which the requested quantity is undefined.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Malformed input file; the message names the offending record.
    #[error("format error: {0}")]
    Format(String),

    /// Unknown dataset or method name; lists the accepted vocabulary.
    #[error("unknown name: {0}")]
    UnknownName(String),

    /// Underlying I/O failure with path context.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Wraps an I/O error with the path it happened on.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
