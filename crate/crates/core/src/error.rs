use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("elements belong to different algebras ({left} vs {right})")]
    AlgebraMismatch { left: String, right: String },

    #[error("element {0} is not invertible")]
    NotInvertible(String),

    #[error("flag `{flag}` contradicted: {witness}")]
    FlagContradiction { flag: &'static str, witness: String },

    #[error("malformed algebra spec: {0}")]
    MalformedSpec(String),

    #[error("unknown builtin algebra `{0}`")]
    UnknownAlgebra(String),

    #[error("coordinate vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("operation not supported for nonassociative algebra {0}")]
    UnsupportedForNonassociative(String),

    #[error("map has no representation over the registered generators (rank {rank} of {needed})")]
    NoRepresentation { rank: usize, needed: usize },

    #[error("exact scalar path required for {0}")]
    ExactPathRequired(&'static str),

    #[error("inverse node in polynomial-only context: {0}")]
    InverseNotAllowed(String),

    #[error("form of order {expected} evaluated with {got} directions")]
    ArityMismatch { expected: usize, got: usize },

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("truncation order {order} too small: remainder bound {bound:e} exceeds {allowed:e}")]
    InsufficientTruncation { order: usize, bound: f64, allowed: f64 },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("integration inconsistency: {0}")]
    Inconsistent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
