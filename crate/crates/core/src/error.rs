use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter N must be at least 2, got {0}")]
    InvalidParameter(u32),

    #[error("{what} = {value} lies outside [0, 1]")]
    OutOfUnitInterval { what: &'static str, value: f64 },

    #[error("digit {digit} is below the minimum N = {min}")]
    DigitBelowMinimum { digit: u64, min: u32 },

    #[error("digit does not fit in 64 bits")]
    DigitOverflow,

    #[error("digit of 1 is infinite; orbit rejected at the boundary")]
    BoundaryOrbit,

    #[error("cylinder block must be nonempty")]
    EmptyBlock,

    #[error("convergents have indices {hi} and {lo}; expected consecutive")]
    NonConsecutiveConvergents { hi: usize, lo: usize },

    #[error("truncation bound M = {m} is too small (need at least N + 10 = {min})")]
    TruncationTooSmall { m: u64, min: u64 },

    #[error("density is in the wrong form: expected {expected}, got {got}")]
    WrongDensityForm {
        expected: &'static str,
        got: &'static str,
    },

    #[error("grid must contain at least {min} strictly increasing nodes spanning [0, 1]")]
    InvalidGrid { min: usize },

    #[error("rate fit rejected: norms are not monotonically decreasing over the fit window")]
    FitRejected,

    #[error(
        "transfer-operator and Monte Carlo routes disagree at n = {n}, x = {x}: \
         |{operator} - {monte_carlo}| exceeds {sigmas} standard errors ({std_error})"
    )]
    RouteMismatch {
        n: usize,
        x: f64,
        operator: f64,
        monte_carlo: f64,
        std_error: f64,
        sigmas: f64,
    },

    #[error("cannot parse {0:?} as a rational or decimal in [0, 1]")]
    ParseNumber(String),
}

pub type Result<T> = std::result::Result<T, Error>;
