use thiserror::Error;

/// Errors raised by the symbolic and pointwise operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at offset {pos}")]
    UnknownIdentifier { pos: usize, name: String },

    #[error("zero denominator at offset {pos}")]
    ZeroDenominator { pos: usize },

    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("1-form vanishes at the base point")]
    FormVanishes,

    #[error("skew pairing is empty (k = 1)")]
    EmptyPairing,

    #[error("subspace is based at a different point")]
    BaseMismatch,

    #[error("matrix is not symmetric")]
    Asymmetric,

    #[error("conflicting Christoffel symbols for k={k}, i={i}, j={j}")]
    ConnectionConflict { k: usize, i: usize, j: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("hypothesis violated at step `{step}`: {reason}")]
    HypothesisViolated { step: String, reason: String },

    #[error("step `{step}` failed: {reason}")]
    StepFailed { step: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
