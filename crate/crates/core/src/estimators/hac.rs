use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statcore::{ols_slices, RegressionFit, SeriesPanel};

/// Bartlett-kernel bandwidth `m`; the correction sums `m - 1` autocorrelations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bandwidth {
    Fixed(usize),
    /// `0.75 T^{1/3}` rounded to the nearest integer (at least 1).
    RuleOfThumb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HacOptions {
    pub bandwidth: Bandwidth,
}

impl Default for HacOptions {
    fn default() -> Self {
        HacOptions { bandwidth: Bandwidth::RuleOfThumb }
    }
}

impl HacOptions {
    pub fn bandwidth_for(&self, t: usize) -> usize {
        match self.bandwidth {
            Bandwidth::Fixed(m) => m,
            Bandwidth::RuleOfThumb => ((0.75 * (t as f64).cbrt()).round() as usize).max(1),
        }
    }
}

/// Bartlett correction `1 + 2 sum_{j<m} ((m-j)/m) rho_j` for the
/// autocorrelations `rho_j` of `v` (uncentered).
pub fn bartlett_factor(v: &[f64], m: usize) -> f64 {
    let denom: f64 = v.iter().map(|x| x * x).sum();
    if denom == 0.0 {
        return 1.0;
    }
    let mut f = 1.0;
    for j in 1..m.min(v.len()) {
        let rho: f64 = (j..v.len()).map(|t| v[t] * v[t - j]).sum::<f64>() / denom;
        f += 2.0 * ((m - j) as f64 / m as f64) * rho;
    }
    f
}

/// Newey-West standard errors for every slope of an OLS fit.
///
/// For slope `j`, let `x~` be the part of regressor `j` orthogonal to the
/// other regressors (and the intercept), `e` the OLS residuals and
/// `v_t = x~_t e_t`. Then
/// `se_j^2 = (1/T) [sum x~^2 e^2 / (T-k)] / [sum x~^2 / T]^2 * f`,
/// with `k` the number of estimated parameters and `f` the Bartlett factor
/// of `v`. With a single regressor `x~` is `x - mean(x)`.
pub(crate) fn nw_se(fit: &RegressionFit, cols: &[&[f64]], m: usize) -> Result<Vec<f64>> {
    let e = fit.residuals.values();
    let t = e.len();
    if m >= t {
        return Err(Error::Domain(format!("bandwidth {m} must be below T = {t}")));
    }
    if m == 0 {
        return Err(Error::Domain("bandwidth must be at least 1".to_string()));
    }
    let k = fit.n_params();
    let tf = t as f64;
    (0..cols.len())
        .map(|j| {
            let x_tilde: Vec<f64> = if cols.len() == 1 {
                if fit.has_intercept {
                    let mean = cols[0].iter().sum::<f64>() / tf;
                    cols[0].iter().map(|v| v - mean).collect()
                } else {
                    cols[0].to_vec()
                }
            } else {
                let others: Vec<&[f64]> = cols
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .map(|(_, c)| *c)
                    .collect();
                ols_slices(cols[j], &others, fit.has_intercept)?
                    .residuals
                    .into_inner()
            };
            let sxx: f64 = x_tilde.iter().map(|v| v * v).sum();
            let v: Vec<f64> = x_tilde.iter().zip(e).map(|(a, b)| a * b).collect();
            let num: f64 = v.iter().map(|w| w * w).sum::<f64>() / (t - k) as f64;
            let s2 = num / (sxx / tf).powi(2) / tf * bartlett_factor(&v, m);
            Ok(s2.max(0.0).sqrt())
        })
        .collect()
}

/// Replaces the standard errors of an OLS fit of some `y` on the columns of
/// `x` (rows aligned with the fit's residuals) by Newey-West HAC standard
/// errors. Point estimates are untouched.
pub fn nw_adjust(fit: &RegressionFit, x: &SeriesPanel, opts: &HacOptions) -> Result<RegressionFit> {
    if x.n_rows() != fit.residuals.len() {
        return Err(Error::LengthMismatch { left: fit.residuals.len(), right: x.n_rows() });
    }
    if x.n_cols() != fit.coefficients.len() {
        return Err(Error::LengthMismatch { left: fit.coefficients.len(), right: x.n_cols() });
    }
    let cols: Vec<&[f64]> = x.columns().iter().map(|c| c.values()).collect();
    let m = opts.bandwidth_for(x.n_rows());
    let se = nw_se(fit, &cols, m)?;
    Ok(fit.clone().with_se(se))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_of_thumb() {
        assert_eq!(HacOptions::default().bandwidth_for(100), 3);
        assert_eq!(HacOptions::default().bandwidth_for(1000), 8);
    }

    #[test]
    fn bandwidth_one_has_no_correction() {
        assert_eq!(bartlett_factor(&[1.0, 2.0, -1.0, 0.5], 1), 1.0);
    }

    #[test]
    fn bartlett_by_hand() {
        // m = 2: f = 1 + 2 * (1/2) * rho_1
        let v = [1.0, 2.0, -1.0];
        let rho1 = (2.0 * 1.0 - 2.0) / 6.0;
        assert!((bartlett_factor(&v, 2) - (1.0 + rho1)).abs() < 1e-15);
    }
}
