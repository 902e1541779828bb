use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statcore::{ols_slices, RegressionFit, Series, SeriesPanel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoOptions {
    /// Stop once `|rho_new - rho_old| < tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CoOptions {
    fn default() -> Self {
        CoOptions { tol: 1e-6, max_iter: 50 }
    }
}

/// Cochrane-Orcutt estimate.
///
/// `fit.coefficients` and `fit.intercept` are on the original scale (the
/// transformed intercept divided by `1 - rho`). Residuals, standard errors,
/// t-statistics and R^2 are those of the final quasi-differenced
/// regression. When the first `rho` is already below `tol` the plain OLS
/// fit is returned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoFit {
    pub fit: RegressionFit,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn lag1_autocorr(e: &[f64]) -> f64 {
    let den: f64 = e.iter().map(|v| v * v).sum();
    let num: f64 = e.windows(2).map(|w| w[0] * w[1]).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn cochrane_orcutt(y: &Series, x: &SeriesPanel, opts: &CoOptions) -> Result<CoFit> {
    let t = y.len();
    if t < 10 {
        return Err(Error::TooShort { needed: 10, got: t });
    }
    if x.n_rows() != t {
        return Err(Error::LengthMismatch { left: t, right: x.n_rows() });
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".to_string()));
    }
    let cols: Vec<&[f64]> = x.columns().iter().map(|c| c.values()).collect();
    let mut fit = ols_slices(y, &cols, true)?;
    let mut rho_prev = 0.0;
    let mut rho = 0.0;
    for iter in 1..=opts.max_iter.max(1) {
        // residuals on the original scale
        let e: Vec<f64> = (0..t)
            .map(|s| {
                y[s] - fit.intercept
                    - fit.coefficients.iter().zip(&cols).map(|(b, c)| b * c[s]).sum::<f64>()
            })
            .collect();
        let r = lag1_autocorr(&e);
        if !(r.abs() < 1.0) {
            return Err(Error::NonConvergence {
                iterations: iter,
                reason: format!("residual autocorrelation {r} outside (-1, 1)"),
            });
        }
        if (r - rho_prev).abs() < opts.tol {
            return Ok(CoFit { fit, rho, iterations: iter, converged: true });
        }
        rho = r;
        let ys: Vec<f64> = (1..t).map(|s| y[s] - rho * y[s - 1]).collect();
        let xs: Vec<Vec<f64>> = cols
            .iter()
            .map(|c| (1..t).map(|s| c[s] - rho * c[s - 1]).collect())
            .collect();
        let xs_refs: Vec<&[f64]> = xs.iter().map(|c| c.as_slice()).collect();
        let mut f = ols_slices(&ys, &xs_refs, true)?;
        f.intercept /= 1.0 - rho;
        f.intercept_se /= (1.0 - rho).abs();
        fit = f;
        rho_prev = rho;
    }
    Ok(CoFit { fit, rho, iterations: opts.max_iter.max(1), converged: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_autocorrelation_returns_ols() {
        // residuals alternate in a way that makes the lag-1 product sum vanish
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0];
        let e = [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        let y: Vec<f64> = x.iter().zip(e).map(|(a, b)| 2.0 * a + b).collect();
        let ys = Series::new(y).unwrap();
        let panel = SeriesPanel::from_columns(vec![x]).unwrap();
        let ols = crate::statcore::ols(&ys, &panel, true).unwrap();
        let r0 = lag1_autocorr(ols.residuals.values());
        let co = cochrane_orcutt(&ys, &panel, &CoOptions { tol: r0.abs() + 1e-9, max_iter: 50 }).unwrap();
        assert_eq!(co.iterations, 1);
        assert_eq!(co.fit, ols);
        assert_eq!(co.rho, 0.0);
    }
}
