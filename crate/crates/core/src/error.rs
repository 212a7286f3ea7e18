use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{a} is not invertible modulo {q}")]
    NotInvertible { a: String, q: String },

    #[error("bezout identity undefined for (0, 0)")]
    BezoutZero,

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("conjugation exponent {m} is not a unit modulo {order}")]
    NotAUnit { m: i64, order: usize },

    #[error("order {from} does not divide target order {to}")]
    OrderMismatch { from: usize, to: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("coefficient self-check failed for a={a}, q={q}, k={k}: residual {residual:e}")]
    GaussSelfCheck { a: i64, q: u64, k: i64, residual: f64 },

    #[error("cell ({lo}, {hi}) has non-constant membership")]
    CorruptCell { lo: String, hi: String },

    #[error("coefficients are not antisymmetric at n={0}")]
    NotAntisymmetric(i64),

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
