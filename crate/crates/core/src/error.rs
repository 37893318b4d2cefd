use thiserror::Error;

/// Errors raised by calibration, solvers and evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested operation.
    #[error("{0}")]
    Domain(String),

    /// The root solver could not find a sign change, even after expanding the bracket.
    #[error("root not bracketed: f(lo) and f(hi) do not straddle the target on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    /// Bisection stopped at the iteration limit before the bracket was narrow enough.
    #[error("bisection did not converge within {0} iterations")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
