use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid q = {0}: q must be nonzero and not a root of unity")]
    InvalidQ(String),

    #[error("prime {prime} divides q = {q}")]
    PrimeDividesQ { prime: u64, q: String },

    #[error("division by (z - xi) requires xi != 0")]
    ZeroPoint,

    #[error("insufficient coefficients: need {needed}, have {available}")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("the zero operator has no {0}")]
    ZeroOperator(&'static str),

    #[error("Gevrey order must be nonzero for {0}")]
    ZeroGevreyOrder(&'static str),

    #[error("repeated exponential rate {0}")]
    RepeatedRate(String),

    #[error("all coefficients vanish")]
    ZeroSeries,

    #[error("series diverges p-adically: val_{prime}(xi) = {valuation} is too negative")]
    Divergent { prime: u64, valuation: i64 },

    #[error("precision must be at least 1")]
    ZeroPrecision,

    #[error("inconsistent bounds: {0}")]
    InconsistentBounds(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no annihilating operator within order {order} and degree {degree}")]
    GuessFailed { order: usize, degree: usize },

    #[error("|c| = {0} is not < 1")]
    NotContracting(String),

    #[error("division by zero")]
    DivisionByZero,
}
