//! Spurious correlation between serially dependent time series: finite-sample
//! theory, data-generating processes and Monte Carlo engine, ARMA filtering,
//! regression estimators (HAC, Cochrane-Orcutt, dynamic regression, LASSO and
//! their filtered-residual variants) and a rolling-window forecasting pipeline.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod armafilter;
pub mod dgp;
pub mod error;
pub mod estimators;
pub mod forecast;
pub mod statcore;
pub mod theory;

pub use error::{Error, Result};
