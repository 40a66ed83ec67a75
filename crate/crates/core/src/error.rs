use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("norm exponent must be >= 1 or infinite, got {0}")]
    InvalidExponent(f64),

    #[error("non-finite value in input")]
    NonFinite,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("t = {0} lies outside [0, 1]")]
    OutOfDomain(f64),

    #[error("expected {expected} entries, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("budget exceeded: {requested} items requested, limit is {limit}")]
    BudgetExceeded { requested: u128, limit: u128 },

    #[error("integration depth {depth} is below the largest level {max_level}")]
    DepthTooSmall { depth: u32, max_level: u32 },

    #[error("Rademacher levels start at 1")]
    InvalidLevel,

    #[error("the zero polynomial has no norming vector")]
    ZeroPolynomial,
}

pub type Result<T> = std::result::Result<T, Error>;
