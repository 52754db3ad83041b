use thiserror::Error;

/// Syntax error with a byte offset into the offending input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} (at offset {offset})")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
}

impl ParseError {
    pub fn new(message: impl Into<String>, offset: usize) -> Self {
        ParseError { message: message.into(), offset }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("the solution group is infinite (rank {rank} < {dim})")]
    InfiniteGroup { rank: usize, dim: usize },

    #[error("degenerate weight matrix: {0}")]
    DegenerateWeights(String),

    #[error("invalid R-charge: {0}")]
    InvalidRCharge(String),

    #[error("G and C*_R are not compatible: {0}")]
    Compatibility(String),

    #[error("R-charge shift cannot be normalized: {0}")]
    Shift(String),

    #[error("superpotential structure is ambiguous: {0}")]
    Structure(String),

    #[error("quasimap degree relation violated at vertex {vertex}: {detail}")]
    DegreeRelation { vertex: usize, detail: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
