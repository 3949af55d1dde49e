use thiserror::Error;

use crate::lattice::Frequency;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate overflow: {0}")]
    Overflow(String),

    #[error("precision exhausted at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },

    #[error("witness search exhausted its budget after {found} of {requested} witnesses (radius {radius})")]
    BudgetExhausted {
        found: usize,
        requested: usize,
        radius: i64,
        /// Largest r for which the witnesses found so far still satisfy the defining inequality.
        max_r_supported: Option<f64>,
    },

    #[error("right-hand side is incompatible at {} frequencies", violations.len())]
    Incompatible { violations: Vec<Frequency> },

    #[error("every frequency in the window is a zero of the symbol")]
    Degenerate,

    #[error("no registered irrationality measure for {0}")]
    UnknownClass(String),

    #[error("malformed distribution file: {0}")]
    Format(String),
}
