use thiserror::Error;

/// Errors raised by the numerics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("gcd({a}, {q}) = {gcd}, expected coprime arguments")]
    NotCoprime { a: u64, q: u64, gcd: u64 },

    #[error("table covers [{lo}, {hi}] but [{need_lo}, {need_hi}] was requested")]
    RangeMismatch {
        lo: u64,
        hi: u64,
        need_lo: u64,
        need_hi: u64,
    },

    #[error("the digit set is empty on the requested range")]
    EmptySet,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("quadrature budget exceeded: {needed} nodes > {budget}")]
    Budget { needed: u64, budget: u64 },

    #[error("sieve cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numeric guard (overflow, budget, precision),
    /// as opposed to bad input.
    pub fn is_numeric_guard(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_) | Error::Numerical(_) | Error::Budget { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
