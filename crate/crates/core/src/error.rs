use thiserror::Error;

/// Every failure the library can report. Variants are grouped by the layer
/// that raises them, but one enum keeps `?` usable across layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("modulus must be monic of degree {expected}")]
    BadModulus { expected: u32 },
    #[error("field of order {q} exceeds the 2^16 cap")]
    FieldTooLarge { q: u64 },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("gcd of two zero polynomials")]
    BothZero,
    #[error("zero coefficient vector")]
    ZeroVector,
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("no p-th root: nonzero coefficient at exponent {exponent}")]
    NoRoot { exponent: i64 },
    #[error("no square root: {0}")]
    NoSquareRoot(String),

    #[error("not enough partial quotients: sum of degrees {have}, need more than {need}")]
    InsufficientTerms { have: i64, need: i64 },
    #[error("continued fraction terminated after {terms} terms: input is rational")]
    RationalDetected { terms: usize },

    #[error("scale {m} lies below the domain start {t0}")]
    BelowDomain { m: i64, t0: i64 },
    #[error("function is not non-increasing at scale {m}")]
    NotMonotone { m: i64 },
    #[error("search space of {count} candidates exceeds the cap {cap}")]
    TooLarge { count: u128, cap: u128 },
    #[error("domain error: {0}")]
    DomainError(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no base point representable on the curve")]
    NoBasePoint,
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("schedule infeasible at scale {scale}: {reason}")]
    ScheduleInfeasible { scale: i64, reason: String },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("property probe {probe} failed at item {index}")]
    ProbeFailed { probe: String, index: usize },

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn precision(what: impl Into<String>) -> Self {
        Error::PrecisionExhausted(what.into())
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }

    /// Stable machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::ReducibleModulus { .. } => "ReducibleModulus",
            Error::BadModulus { .. } => "BadModulus",
            Error::FieldTooLarge { .. } => "FieldTooLarge",
            Error::ZeroInverse => "ZeroInverse",
            Error::FieldMismatch => "FieldMismatch",
            Error::DivisionByZeroPoly => "DivisionByZeroPoly",
            Error::BothZero => "BothZero",
            Error::ZeroVector => "ZeroVector",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::NoRoot { .. } => "NoRoot",
            Error::NoSquareRoot(_) => "NoSquareRoot",
            Error::InsufficientTerms { .. } => "InsufficientTerms",
            Error::RationalDetected { .. } => "RationalDetected",
            Error::BelowDomain { .. } => "BelowDomain",
            Error::NotMonotone { .. } => "NotMonotone",
            Error::TooLarge { .. } => "TooLarge",
            Error::DomainError(_) => "DomainError",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NoBasePoint => "NoBasePoint",
            Error::Internal(_) => "Internal",
            Error::ScheduleInfeasible { .. } => "ScheduleInfeasible",
            Error::VerificationFailed(_) => "VerificationFailed",
            Error::ProbeFailed { .. } => "ProbeFailed",
            Error::Parse { .. } => "ParseError",
            Error::Invalid(_) => "Invalid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
