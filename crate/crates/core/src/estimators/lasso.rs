//! LASSO by cyclic coordinate descent with soft-thresholding.
//!
//! The objective is `(1/2T) ||y_c - Z a||^2 + lambda ||a||_1`, where `y_c` is
//! the centered response and `Z` holds the columns standardized to mean 0
//! and `z'z / T = 1`. Coefficients are reported both on that scale and
//! mapped back to the original columns; the intercept is unpenalized.

use serde::{Deserialize, Serialize};

use super::lagged::{filtered_inputs, LagSpec, LaggedDesign, UOptions};
use crate::armafilter::FilteredPanel;
use crate::error::{Error, Result};
use crate::statcore::{ols_slices, Series, SeriesPanel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoOptions {
    /// Converged when a full sweep changes no coefficient by more than this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Number of penalty values on the BIC path.
    pub path_len: usize,
    /// Smallest path penalty as a fraction of `lambda_max`.
    pub min_ratio: f64,
}

impl Default for LassoOptions {
    fn default() -> Self {
        LassoOptions { tol: 1e-7, max_sweeps: 100_000, path_len: 100, min_ratio: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoFit {
    pub lambda: f64,
    /// Coefficients of the original (unstandardized) columns.
    pub coefficients: Vec<f64>,
    /// Coefficients of the standardized columns.
    pub std_coefficients: Vec<f64>,
    pub intercept: f64,
    pub active_set: Vec<usize>,
    pub rss: f64,
    /// `T ln(RSS/T) + |active| ln T`.
    pub bic: f64,
    pub n_iter: usize,
}

impl LassoFit {
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(row).map(|(b, x)| b * x).sum::<f64>()
    }
}

/// Standardized LASSO problem, reusable along a penalty path.
pub struct LassoProblem {
    z: Vec<Vec<f64>>,
    yc: Vec<f64>,
    means: Vec<f64>,
    sds: Vec<f64>,
    y_mean: f64,
}

impl LassoProblem {
    pub fn new(y: &[f64], cols: &[&[f64]]) -> Result<Self> {
        let t = y.len();
        if t < 2 {
            return Err(Error::TooShort { needed: 2, got: t });
        }
        if cols.is_empty() {
            return Err(Error::InvalidInput("LASSO needs at least one column".to_string()));
        }
        let tf = t as f64;
        let mut z = Vec::with_capacity(cols.len());
        let mut means = Vec::with_capacity(cols.len());
        let mut sds = Vec::with_capacity(cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != t {
                return Err(Error::LengthMismatch { left: t, right: c.len() });
            }
            let m = c.iter().sum::<f64>() / tf;
            let sd = (c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / tf).sqrt();
            let max_abs = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if !(sd > 1e-14 * max_abs.max(f64::MIN_POSITIVE)) {
                return Err(Error::DegenerateVariance(format!("LASSO column {j} is constant")));
            }
            z.push(c.iter().map(|v| (v - m) / sd).collect());
            means.push(m);
            sds.push(sd);
        }
        let y_mean = y.iter().sum::<f64>() / tf;
        let yc = y.iter().map(|v| v - y_mean).collect();
        Ok(LassoProblem { z, yc, means, sds, y_mean })
    }

    pub fn n_obs(&self) -> usize {
        self.yc.len()
    }

    /// `max_j |z_j' y_c| / T`: the smallest penalty with an all-zero solution.
    pub fn lambda_max(&self) -> f64 {
        let tf = self.n_obs() as f64;
        self.z
            .iter()
            .map(|c| dot(c, &self.yc).abs() / tf)
            .fold(0.0, f64::max)
    }

    fn objective(&self, r: &[f64], a: &[f64], lambda: f64) -> f64 {
        let tf = self.n_obs() as f64;
        r.iter().map(|v| v * v).sum::<f64>() / (2.0 * tf) + lambda * a.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Coordinate descent from `start`. Sweeps alternate between the full
    /// coordinate set and the current active set; convergence is declared
    /// only after a full sweep. `history`, when given, receives the
    /// objective after every sweep.
    fn solve(
        &self,
        lambda: f64,
        start: &[f64],
        opts: &LassoOptions,
        mut history: Option<&mut Vec<f64>>,
    ) -> Result<(Vec<f64>, usize)> {
        let tf = self.n_obs() as f64;
        let p = self.z.len();
        let mut a = start.to_vec();
        let mut r = self.yc.clone();
        for (j, aj) in a.iter().enumerate() {
            if *aj != 0.0 {
                axpy(-aj, &self.z[j], &mut r);
            }
        }
        let mut sweeps = 0;
        let mut full = true;
        while sweeps < opts.max_sweeps {
            sweeps += 1;
            let mut max_change = 0.0f64;
            for j in 0..p {
                if !full && a[j] == 0.0 {
                    continue;
                }
                let zj = &self.z[j];
                let rho = dot(zj, &r) / tf + a[j];
                let new = soft_threshold(rho, lambda);
                let delta = new - a[j];
                if delta != 0.0 {
                    axpy(-delta, zj, &mut r);
                    a[j] = new;
                    max_change = max_change.max(delta.abs());
                }
            }
            if let Some(h) = history.as_deref_mut() {
                h.push(self.objective(&r, &a, lambda));
            }
            if max_change < opts.tol {
                if full {
                    return Ok((a, sweeps));
                }
                full = true;
            } else {
                full = false;
            }
        }
        Err(Error::NonConvergence {
            iterations: opts.max_sweeps,
            reason: format!("coordinate descent at lambda = {lambda}"),
        })
    }

    fn finish(&self, lambda: f64, a: Vec<f64>, n_iter: usize) -> LassoFit {
        let t = self.n_obs();
        let tf = t as f64;
        let mut r = self.yc.clone();
        for (j, aj) in a.iter().enumerate() {
            if *aj != 0.0 {
                axpy(-aj, &self.z[j], &mut r);
            }
        }
        let rss: f64 = r.iter().map(|v| v * v).sum();
        let active_set: Vec<usize> = (0..a.len()).filter(|&j| a[j] != 0.0).collect();
        let coefficients: Vec<f64> = a.iter().zip(&self.sds).map(|(b, s)| b / s).collect();
        let intercept = self.y_mean
            - coefficients.iter().zip(&self.means).map(|(b, m)| b * m).sum::<f64>();
        LassoFit {
            lambda,
            bic: tf * (rss / tf).max(f64::MIN_POSITIVE).ln() + active_set.len() as f64 * tf.ln(),
            coefficients,
            std_coefficients: a,
            intercept,
            active_set,
            rss,
            n_iter,
        }
    }

    pub fn fit(&self, lambda: f64, opts: &LassoOptions) -> Result<LassoFit> {
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("lambda = {lambda} must be non-negative")));
        }
        let (a, n) = self.solve(lambda, &vec![0.0; self.z.len()], opts, None)?;
        Ok(self.finish(lambda, a, n))
    }

    /// Fit plus the objective value after each sweep.
    pub fn fit_with_history(&self, lambda: f64, opts: &LassoOptions) -> Result<(LassoFit, Vec<f64>)> {
        let mut h = vec![self.objective(&self.yc, &vec![0.0; self.z.len()], lambda)];
        let (a, n) = self.solve(lambda, &vec![0.0; self.z.len()], opts, Some(&mut h))?;
        Ok((self.finish(lambda, a, n), h))
    }

    /// Penalties `lambda_max * min_ratio^{k/(K-1)}`, `k = 0..K`.
    pub fn lambda_path(&self, opts: &LassoOptions) -> Vec<f64> {
        let lmax = self.lambda_max();
        let k = opts.path_len.max(2);
        (0..k)
            .map(|i| lmax * opts.min_ratio.powf(i as f64 / (k - 1) as f64))
            .collect()
    }

    /// Warm-started path fits, largest penalty first.
    pub fn path(&self, opts: &LassoOptions) -> Result<Vec<LassoFit>> {
        let mut a = vec![0.0; self.z.len()];
        let mut out = Vec::with_capacity(opts.path_len);
        for lambda in self.lambda_path(opts) {
            let (next, n) = self.solve(lambda, &a, opts, None)?;
            a = next.clone();
            out.push(self.finish(lambda, next, n));
        }
        Ok(out)
    }

    /// Minimum-BIC fit along the path. Fits with `|active| >= T - 1` are not
    /// eligible; ties go to the larger penalty.
    pub fn bic_select(&self, opts: &LassoOptions) -> Result<LassoFit> {
        let t = self.n_obs();
        let mut best: Option<LassoFit> = None;
        for f in self.path(opts)? {
            if f.active_set.len() + 1 >= t {
                continue;
            }
            if best.as_ref().is_none_or(|b| f.bic < b.bic) {
                best = Some(f);
            }
        }
        best.ok_or_else(|| Error::InvalidInput("no eligible penalty on the path".to_string()))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

fn panel_refs(x: &SeriesPanel) -> Vec<&[f64]> {
    x.columns().iter().map(|c| c.values()).collect()
}

/// LASSO at a fixed penalty.
pub fn lasso_cd(y: &Series, x: &SeriesPanel, lambda: f64, opts: &LassoOptions) -> Result<LassoFit> {
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch { left: y.len(), right: x.n_rows() });
    }
    LassoProblem::new(y, &panel_refs(x))?.fit(lambda, opts)
}

/// LASSO with the penalty chosen by BIC over a log-spaced path.
pub fn lasso_bic(y: &Series, x: &SeriesPanel, opts: &LassoOptions) -> Result<LassoFit> {
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch { left: y.len(), right: x.n_rows() });
    }
    LassoProblem::new(y, &panel_refs(x))?.bic_select(opts)
}

/// Options of the filtered-residual LASSO.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ULassoOptions {
    pub u: UOptions,
    /// Penalize the own-lag columns like the filtered covariates. When
    /// false they are partialled out first and estimated by least squares.
    pub penalize_y_lags: bool,
    pub lasso: LassoOptions,
}

impl Default for ULassoOptions {
    fn default() -> Self {
        ULassoOptions { u: UOptions::default(), penalize_y_lags: true, lasso: LassoOptions::default() }
    }
}

/// BIC-tuned LASSO of `y_t` on `u_hat_{i,t-lag}` and `y_{t-1..t-y_lags}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ULassoFit {
    pub lasso: LassoFit,
    /// Coefficients of the filtered covariates (original scale).
    pub u_coefficients: Vec<f64>,
    pub y_lag_coefficients: Vec<f64>,
    pub intercept: f64,
    pub filtered: FilteredPanel,
    /// Regressand rows start at input row `offset + design_start`.
    pub design_start: usize,
}

impl ULassoFit {
    /// Number of selected filtered covariates.
    pub fn n_selected(&self) -> usize {
        self.u_coefficients.iter().filter(|b| **b != 0.0).count()
    }
}

pub fn u_lasso(y: &Series, panel: &SeriesPanel, opts: &ULassoOptions) -> Result<ULassoFit> {
    let (filtered, y_cut) = filtered_inputs(y, panel, &opts.u)?;
    fit_lagged_lasso(&y_cut, &filtered.residuals, &opts.u, opts.penalize_y_lags, &opts.lasso).map(
        |(lasso, u_coefficients, y_lag_coefficients, intercept, design_start)| ULassoFit {
            lasso,
            u_coefficients,
            y_lag_coefficients,
            intercept,
            filtered,
            design_start,
        },
    )
}

type LaggedLasso = (LassoFit, Vec<f64>, Vec<f64>, f64, usize);

/// BIC LASSO of `y_t` on `x_{i,t-lag}` and `y_{t-1..t-y_lags}`. Returns the
/// fit, covariate coefficients, own-lag coefficients, intercept and the
/// first regressand row.
pub(crate) fn fit_lagged_lasso(
    y: &[f64],
    x: &SeriesPanel,
    u: &UOptions,
    penalize_y_lags: bool,
    opts: &LassoOptions,
) -> Result<LaggedLasso> {
    let spec = LagSpec::new(1..=u.y_lags, [u.covariate_lag]);
    let d = LaggedDesign::build(y, x, &spec)?;
    let ny = u.y_lags;
    let refs = d.column_refs();
    let (fit, xc, yc, b0) = split_penalty_lasso(&d.y, &refs[..ny], &refs[ny..], penalize_y_lags, opts)?;
    Ok((fit, xc, yc, b0, d.start))
}

/// BIC LASSO of `y` on the `penalized` columns plus the `free` columns.
/// When `penalize_free` is false the free columns are partialled out of
/// `y` and of the penalized columns, the LASSO runs on the residuals, and
/// the free coefficients are then estimated by least squares given the
/// penalized ones. Returns the LASSO fit, the penalized and free
/// coefficients (original scale) and the intercept.
pub(crate) fn split_penalty_lasso(
    y: &[f64],
    free: &[&[f64]],
    penalized: &[&[f64]],
    penalize_free: bool,
    opts: &LassoOptions,
) -> Result<(LassoFit, Vec<f64>, Vec<f64>, f64)> {
    let nf = free.len();
    if penalize_free || nf == 0 {
        let cols: Vec<&[f64]> = free.iter().chain(penalized).copied().collect();
        let fit = LassoProblem::new(y, &cols)?.bic_select(opts)?;
        let fc = fit.coefficients[..nf].to_vec();
        let pc = fit.coefficients[nf..].to_vec();
        let b0 = fit.intercept;
        return Ok((fit, pc, fc, b0));
    }
    let y_res = ols_slices(y, free, true)?.residuals.into_inner();
    let x_res = penalized
        .iter()
        .map(|c| Ok(ols_slices(c, free, true)?.residuals.into_inner()))
        .collect::<Result<Vec<_>>>()?;
    let x_refs: Vec<&[f64]> = x_res.iter().map(|c| c.as_slice()).collect();
    let fit = LassoProblem::new(&y_res, &x_refs)?.bic_select(opts)?;
    let pc = fit.coefficients.clone();
    let partial: Vec<f64> = (0..y.len())
        .map(|r| y[r] - pc.iter().zip(penalized).map(|(b, c)| b * c[r]).sum::<f64>())
        .collect();
    let ls = ols_slices(&partial, free, true)?;
    Ok((fit, pc, ls.coefficients, ls.intercept))
}

/// Euclidean distance between an estimate and the truth.
pub fn coef_error(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::LengthMismatch { left: estimate.len(), right: truth.len() });
    }
    Ok(estimate
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
    }

    #[test]
    fn coef_error_cases() {
        assert_eq!(coef_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(coef_error(&[1.0, 1.0], &[0.0, 0.0]).unwrap(), 2f64.sqrt());
        assert!(coef_error(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn above_lambda_max_is_zero() {
        let y = [1.0, 3.0, 2.0, 5.0, 4.0];
        let x = [0.5, 1.0, 0.2, 2.0, 1.1];
        let p = LassoProblem::new(&y, &[&x]).unwrap();
        let f = p.fit(p.lambda_max() * 1.0001, &LassoOptions::default()).unwrap();
        assert!(f.active_set.is_empty());
        assert_eq!(f.intercept, 3.0);
    }
}
