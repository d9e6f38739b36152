use thiserror::Error;

/// Errors raised by the arithmetic kernel, the dynamics and the verifiers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("valuation is not certified: every known coefficient vanishes")]
    UncertainValuation,

    #[error("precision exhausted: need index {needed}, certified through {available}")]
    PrecisionExhausted { needed: i64, available: i64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("iterate reached an exact rational endpoint")]
    RationalEndpoint,

    #[error("homography does not fix infinity")]
    NotAffine,

    #[error("homography is not in PGL(2, A)")]
    NotInGamma,

    #[error("points are not pairwise distinct")]
    DegeneratePoints,

    #[error("point is a pole of the homography")]
    Pole,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
