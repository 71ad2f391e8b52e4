use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent p must lie in (0, 1], got {0}")]
    InvalidExponent(f64),

    #[error("index k must be a positive integer")]
    NonPositiveIndex,

    #[error("position j = {j} outside [1, q] for q = {q}")]
    PositionOutOfBlock { q: u64, j: u64 },

    #[error("point {0} outside the half-open domain [0, 1)")]
    PointOutsideDomain(f64),

    #[error("point {0} outside [0, 1]")]
    PointOutsideClosedDomain(f64),

    #[error("partition depth near t = 1 exceeds the representable index range")]
    IndexDepthExceeded,

    #[error("search budget allows q <= {max}, got q = {got}")]
    OracleBudgetExceeded { max: u64, got: u64 },

    #[error("variant thm13 requires b > 2(1-p)/p = {min_b}, got b = {b}")]
    InadmissibleDecay { b: f64, min_b: f64 },

    #[error(
        "average undefined: no separately continuous extension at (1, 1) for this construction"
    )]
    UndefinedExtension,

    #[error("partial sum requires 1 <= m <= n, got m = {m}, n = {n}")]
    BadSpanOrder { m: u64, n: u64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
