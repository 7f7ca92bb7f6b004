use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by a series that is zero up to q^{order}")]
    DivisionByZeroSeries { order: i64 },

    #[error("coefficient of q^{exponent} requested but the series is only known through q^{order}")]
    UntrustedCoefficient { exponent: i64, order: i64 },

    #[error("eta quotient {spec} has weight sum {sum}, not divisible by 24")]
    NonIntegralShift { spec: String, sum: i64 },

    #[error("quadratic form ({a}, {b}, {c}) is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },

    #[error("Eisenstein series of weight {weight} violates chi(-1)psi(-1) = (-1)^k")]
    ParityViolation { weight: u32 },

    #[error("unknown entry '{0}'")]
    UnknownEntry(String),

    #[error("unknown closed form '{0}'")]
    UnknownClosedForm(String),

    #[error("unknown character '{0}'")]
    UnknownCharacter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("need q-order at least {needed}, got {available}")]
    InsufficientOrder { needed: i64, available: i64 },

    #[error("shift mismatch: {0}")]
    ShiftMismatch(String),

    #[error("coefficient {index} is not an integer: {value}")]
    NonIntegralCoefficient { index: usize, value: String },

    #[error("closed form {id} at n = {n} is not an integer: {value}")]
    NonIntegralClosedForm { id: String, n: u64, value: String },

    #[error("residual of the t-expansion is nonzero at q^{exponent}")]
    ResidualNonzero { exponent: i64 },

    #[error("index {index} unavailable (have {available} coefficients) at p = {p}, r = {r}, n = {n}")]
    IndexUnavailable { p: u64, r: u32, n: u64, index: u64, available: usize },

    #[error("range exceeded: need index {needed}, sequences have length {available}")]
    RangeExceeded { needed: u64, available: usize },

    #[error("prime {p} does not satisfy chi23(p) = 1")]
    FilterViolation { p: u64 },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
