use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::series::{pairwise_sum, Series, SeriesPanel};
use crate::error::{Error, Result};

/// Result of a least-squares regression.
///
/// `coefficients`, `se_classical`, `se` and `t_stats` refer to the slope
/// regressors in design order; the intercept is reported separately.
/// `se` holds whatever standard errors the producing estimator considers
/// appropriate (classical for plain OLS, HAC for Newey-West, ...), and
/// `t_stats` are computed from `se`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub has_intercept: bool,
    pub intercept_se: f64,
    pub residuals: Series,
    pub se_classical: Vec<f64>,
    pub se: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub r_squared: f64,
    /// Residual variance `RSS / (T - k)`, `k` counting the intercept.
    pub sigma2: f64,
    pub n_obs: usize,
}

impl RegressionFit {
    pub fn n_params(&self) -> usize {
        self.coefficients.len() + usize::from(self.has_intercept)
    }

    pub fn rss(&self) -> f64 {
        let sq: Vec<f64> = self.residuals.iter().map(|e| e * e).collect();
        pairwise_sum(&sq)
    }

    /// Replaces the adjusted standard errors and recomputes t-statistics.
    pub fn with_se(mut self, se: Vec<f64>) -> Self {
        self.t_stats = self
            .coefficients
            .iter()
            .zip(&se)
            .map(|(b, s)| b / s)
            .collect();
        self.se = se;
        self
    }
}

/// Ordinary least squares of `y` on the columns of `x`, solved by QR.
pub fn ols(y: &Series, x: &SeriesPanel, intercept: bool) -> Result<RegressionFit> {
    let cols: Vec<&[f64]> = x.columns().iter().map(|c| c.values()).collect();
    ols_slices(y, &cols, intercept)
}

pub(crate) fn ols_slices(y: &[f64], cols: &[&[f64]], intercept: bool) -> Result<RegressionFit> {
    let t = y.len();
    for c in cols {
        if c.len() != t {
            return Err(Error::LengthMismatch { left: t, right: c.len() });
        }
    }
    let off = usize::from(intercept);
    let k = cols.len() + off;
    if k == 0 {
        return Err(Error::InvalidInput("regression with no regressors".to_string()));
    }
    if t <= k {
        return Err(Error::TooShort { needed: k + 1, got: t });
    }
    let design = DMatrix::from_fn(t, k, |r, c| {
        if c < off {
            1.0
        } else {
            cols[c - off][r]
        }
    });
    let qr = design.clone().qr();
    let r = qr.r();
    for i in 0..k {
        let norm = design.column(i).norm();
        if norm == 0.0 || r[(i, i)].abs() <= 1e-9 * norm {
            return Err(Error::SingularDesign {
                column: i.saturating_sub(off),
            });
        }
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::SingularDesign { column: 0 })?;
    let fitted = &design * &beta;
    let resid: Vec<f64> = (0..t).map(|i| y[i] - fitted[i]).collect();
    let rss = pairwise_sum(&resid.iter().map(|e| e * e).collect::<Vec<_>>());
    let sigma2 = rss / (t - k) as f64;

    let rinv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(Error::SingularDesign { column: 0 })?;
    // diag((X'X)^-1) = row norms of R^-1
    let var_diag: Vec<f64> = (0..k).map(|i| rinv.row(i).norm_squared()).collect();
    let se_all: Vec<f64> = var_diag.iter().map(|v| (sigma2 * v).sqrt()).collect();

    let tss = if intercept {
        let m = pairwise_sum(y) / t as f64;
        pairwise_sum(&y.iter().map(|v| (v - m) * (v - m)).collect::<Vec<_>>())
    } else {
        pairwise_sum(&y.iter().map(|v| v * v).collect::<Vec<_>>())
    };
    let r_squared = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        return Err(Error::DegenerateVariance("regressand is constant".to_string()));
    };

    let coefficients: Vec<f64> = beta.iter().skip(off).copied().collect();
    let se_classical: Vec<f64> = se_all[off..].to_vec();
    let fit = RegressionFit {
        coefficients,
        intercept: if intercept { beta[0] } else { 0.0 },
        has_intercept: intercept,
        intercept_se: if intercept { se_all[0] } else { 0.0 },
        residuals: Series::new(resid)?,
        se_classical: se_classical.clone(),
        se: Vec::new(),
        t_stats: Vec::new(),
        r_squared,
        sigma2,
        n_obs: t,
    };
    Ok(fit.with_se(se_classical))
}
