use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is not square")]
    NotSquare,
    #[error("odd diagonal entry {value} at index {index}: lattice is not even")]
    NotEven { index: usize, value: i64 },
    #[error("degenerate form (determinant 0)")]
    Degenerate,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("vector is not primitive (gcd of coordinates is {0})")]
    Imprimitive(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("group of order {order} exceeds the brute-force bound {bound}")]
    BoundExceeded { order: u64, bound: u64 },
    #[error("subgroup is not isotropic: {0}")]
    NotIsotropic(String),
    #[error("element is not in the dual lattice")]
    NotInDual,
    #[error("wrong deformation type: expected {expected}, got {got}")]
    WrongType { expected: String, got: String },
    #[error("non-integral result: {0}")]
    NonIntegral(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("embedding is invalid: {0}")]
    InvalidEmbedding(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
