use thiserror::Error;

/// Errors raised by the statistical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("singular design: column {column} is (numerically) collinear with earlier columns")]
    SingularDesign { column: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("autoregressive polynomial is not stationary (spectral radius {radius:.6})")]
    Nonstationary { radius: f64 },

    #[error("no convergence after {iterations} iterations: {reason}")]
    NonConvergence { iterations: usize, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("column {column} ({name}): {source}")]
    Column {
        column: usize,
        name: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
