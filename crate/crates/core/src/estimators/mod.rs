//! Regression estimators for serially dependent data: Newey-West HAC
//! standard errors, iterated Cochrane-Orcutt, dynamic regression, least
//! squares and LASSO on filtered residuals, and BIC-tuned LASSO.

mod cochrane;
mod hac;
mod lagged;
mod lasso;

pub use cochrane::{cochrane_orcutt, CoFit, CoOptions};
pub use hac::{bartlett_factor, nw_adjust, Bandwidth, HacOptions};
pub use lagged::{
    dynamic_regression, lagged_regression, term_name, u_ols, LagSpec, LaggedDesign, LaggedFit,
    Term, UOlsFit, UOptions,
};
pub use lasso::{
    coef_error, lasso_bic, lasso_cd, soft_threshold, u_lasso, LassoFit, LassoOptions,
    LassoProblem, ULassoFit, ULassoOptions,
};

pub(crate) use hac::nw_se;
pub(crate) use lasso::{fit_lagged_lasso, split_penalty_lasso};
