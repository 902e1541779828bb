//! Sample statistics, symmetric eigenvalues and least squares.
//!
//! Variances and covariances use divisor `T - 1`. Correlation matrices are
//! built from standardized columns, so eigenvalue statements refer to the
//! correlation matrix.

mod linalg;
mod ols;
mod series;

pub use linalg::{
    cholesky_lower, companion_spectral_radius, max_eigenvalue, max_offdiag_abs, min_eigenvalue,
    SymMatrix,
};
pub use ols::{ols, RegressionFit};
pub use series::{
    correlation_matrix, pairwise_sum, sample_correlation, standardize, Series, SeriesPanel,
};

pub(crate) use ols::ols_slices;
pub(crate) use series::dot;
