use alloc::string::String;

/// Errors raised by the algorithms of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("row length {found} does not match ambient dimension {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("embedding is for (n={emb_n}, d={emb_d}) but the query needs (n={n}, d={d})")]
    DimensionMismatch { n: usize, d: usize, emb_n: usize, emb_d: usize },
    #[error("vertex sets overlap")]
    OverlappingSets,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("malformed Henneberg step: {0}")]
    MalformedStep(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = core::result::Result<T, Error>;
