//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value failed validation. `key` is the dotted path
    /// of the offending entry, e.g. `diffusion.K`.
    #[error("config: {key}: {message}")]
    Config { key: String, message: String },

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: {context}")]
    GridMismatch { context: String },

    /// A field dump could not be parsed or violates the format contract.
    #[error("grid dump {path}: {message}")]
    Format { path: String, message: String },

    /// The PDE solve produced a non-finite value.
    #[error("solver instability at step {step}: {detail}")]
    Instability { step: usize, detail: String },

    /// A runtime contract was violated (caller bug, not bad config).
    #[error("invalid state: {context}")]
    Invalid { context: String },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn invalid(context: impl Into<String>) -> Self {
        Error::Invalid { context: context.into() }
    }

    /// Process exit code per the CLI contract: 1 for configuration
    /// errors, 2 for runtime/solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Format { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
