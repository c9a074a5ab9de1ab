use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chain must contain at least one exponent")]
    EmptyChain,

    #[error("exponent a_{position} must be ≥ 2 (got {value})")]
    InvalidExponent { position: usize, value: i64 },

    #[error("chain degrees overflow 64-bit integers")]
    DegreeOverflow,

    #[error("index {label} is not in the index set")]
    IndexNotInSet { label: String },

    #[error("monomial {monomial} is outside B'")]
    MonomialOutOfRange { monomial: String },

    #[error("sector {label} is not at the top level {expected}")]
    WrongLevel { label: String, expected: usize },

    #[error("rank {rank} exceeds the configured limit {limit}")]
    RankLimit { rank: usize, limit: usize },

    #[error("precision {digits} digits is below the minimum of 32")]
    PrecisionTooLow { digits: u32 },

    #[error("could not certify {what} at {digits} digits")]
    PrecisionUnachievable { what: String, digits: u32 },

    #[error("ch_Gamma is numerically singular (pivot {pivot})")]
    SingularChGamma { pivot: String },

    #[error("quadrature supports n ≤ 2 (got n = {n})")]
    DimensionTooLarge { n: usize },

    #[error("quadrature did not reach {target:e} (estimate {estimate:e})")]
    QuadratureNonConvergent { target: f64, estimate: f64 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("position {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("malformed braid word: {0}")]
    MalformedWord(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
