use std::io;

use thiserror::Error;

/// Errors raised across the crate.
///
/// The CLI maps `Domain`, `ContractViolation`, `SizeMismatch`, `Parse` and
/// `Io` to exit code 1, and `Accuracy` / `NonContraction` to exit code 2.
#[derive(Debug, Error)]
pub enum TricomiError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("value underflows f64 (log value {log_value})")]
    Underflow { log_value: f64 },

    #[error("accuracy error in {context}: estimates {first} and {second} disagree")]
    Accuracy {
        context: String,
        first: f64,
        second: f64,
    },

    #[error("iteration failed to contract: {reason}")]
    NonContraction {
        reason: String,
        diffs: Vec<f64>,
    },

    #[error("nonlinearity contract violated: {0}")]
    ContractViolation(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl TricomiError {
    pub fn domain(msg: impl Into<String>) -> Self {
        TricomiError::Domain(msg.into())
    }

    /// True for failures of numerical accuracy or contraction, as opposed to
    /// invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            TricomiError::Accuracy { .. } | TricomiError::NonContraction { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, TricomiError>;
