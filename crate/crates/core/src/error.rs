use thiserror::Error;

/// Failures raised by the algebra, coding and protocol layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("q must be prime, got {0}")]
    NotPrime(u64),
    #[error("modulus {0} is outside the supported range [2, 2^63)")]
    ModulusOutOfRange(u64),
    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("value {value} is not a residue mod {q}")]
    NotAResidue { value: u64, q: u64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix does not have full row rank (rank {rank} of {rows} rows)")]
    RankDeficient { rank: usize, rows: usize },
    #[error("enumeration of {count} subsets exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },
    #[error("field F_{q} is too small: need at least {needed} distinct points")]
    InsufficientField { q: u64, needed: usize },
    #[error("no valid extension column found after {0} attempts; q is likely too small")]
    RetriesExhausted(usize),
    #[error("evaluation points are not pairwise distinct")]
    DuplicatePoint,
    #[error("multipliers must be nonzero")]
    ZeroMultiplier,
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{0} is not MDS")]
    NotMds(&'static str),
    #[error("invalid demand: {0}")]
    InvalidDemand(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
