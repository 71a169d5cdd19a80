//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum ClipfixError {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A value lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector lengths do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A per-tone channel gain is exactly zero; the realization must be redrawn.
    #[error("singular channel: zero gain at tone {tone}")]
    SingularChannel { tone: usize },

    /// A solver failed at runtime.
    #[error("solver error: {0}")]
    Solver(String),

    /// Experiment configuration is inconsistent.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ClipfixError>;
