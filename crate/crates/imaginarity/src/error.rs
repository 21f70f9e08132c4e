//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by state construction, channel application, divergence
/// evaluation and the optimizers.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("validation: {0}")]
    Validation(String),

    /// Two operands had incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The operation is only defined for a specific dimension (usually qubits).
    #[error("unsupported dimension {dim}: {context}")]
    UnsupportedDimension { dim: usize, context: &'static str },

    /// A numerical routine failed to meet its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A state or channel file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
