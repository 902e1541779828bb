//! Univariate AR/ARMA fitting, BIC order selection and extraction of the
//! one-step-ahead residuals `u_hat` that replace the raw covariates.
//!
//! AR models are fitted by least squares with an intercept. Models with an
//! MA part start from a Hannan-Rissanen two-stage estimate (long
//! autoregression, then least squares on lagged values and lagged proxy
//! residuals) that is refined by minimizing the conditional sum of squares
//! with zero pre-sample residuals. Residuals always start at observation `p`.

mod css;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statcore::{companion_spectral_radius, ols_slices, Series, SeriesPanel};
use css::CssProblem;

/// Orders `(p, q)` of an ARMA model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArmaOrder {
    pub p: usize,
    pub q: usize,
}

impl ArmaOrder {
    pub fn new(p: usize, q: usize) -> Self {
        ArmaOrder { p, q }
    }
}

/// Diagnostics attached to a fit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FitStatus {
    /// The first-stage AR or MA polynomial was outside the admissible region
    /// and was shrunk back inside.
    pub projected: bool,
    /// The conditional-sum-of-squares refinement stopped at its iteration
    /// limit; the first-stage estimates are reported.
    pub not_converged: bool,
    pub iterations: usize,
}

/// A fitted ARMA model `x_t = c + sum phi_l x_{t-l} + e_t + sum theta_k e_{t-k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaFit {
    pub order: ArmaOrder,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub intercept: f64,
    /// Residuals for observations `p..T`.
    pub residuals: Series,
    /// `RSS / (T - p - q - 1)`.
    pub sigma2: f64,
    /// `T ln(sigma2) + (p + q + 1) ln T`.
    pub bic: f64,
    pub status: FitStatus,
}

const STATIONARY_RADIUS: f64 = 1.0 - 1e-8;
const PROJECTED_RADIUS: f64 = 0.995;
const CSS_MAX_ITER: usize = 200;

fn finish(
    s: &[f64],
    order: ArmaOrder,
    ar: Vec<f64>,
    ma: Vec<f64>,
    intercept: f64,
    residuals: Vec<f64>,
    status: FitStatus,
) -> Result<ArmaFit> {
    let t = s.len();
    let k = order.p + order.q + 1;
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = rss / (t - k) as f64;
    if !sigma2.is_finite() {
        return Err(Error::DegenerateVariance(
            "ARMA fit has non-finite residual variance".to_string(),
        ));
    }
    let tf = t as f64;
    Ok(ArmaFit {
        order,
        ar,
        ma,
        intercept,
        residuals: Series::new(residuals)?,
        sigma2,
        bic: tf * sigma2.max(f64::MIN_POSITIVE).ln() + k as f64 * tf.ln(),
        status,
    })
}

fn mean_only(s: &[f64]) -> Result<ArmaFit> {
    let m = s.iter().sum::<f64>() / s.len() as f64;
    let resid = s.iter().map(|v| v - m).collect();
    finish(s, ArmaOrder::new(0, 0), vec![], vec![], m, resid, FitStatus::default())
}

/// Least-squares autoregression of order `p` with intercept.
pub fn fit_ar(s: &Series, p: usize) -> Result<ArmaFit> {
    fit_ar_slice(s, p)
}

fn fit_ar_slice(s: &[f64], p: usize) -> Result<ArmaFit> {
    let t = s.len();
    if t < 2 * p + 2 {
        return Err(Error::TooShort { needed: 2 * p + 2, got: t });
    }
    if p == 0 {
        return mean_only(s);
    }
    let (ar, c, resid) = ar_ols(s, p)?;
    finish(s, ArmaOrder::new(p, 0), ar, vec![], c, resid, FitStatus::default())
}

fn ar_ols(s: &[f64], p: usize) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    let t = s.len();
    let y = &s[p..];
    let lags: Vec<&[f64]> = (1..=p).map(|l| &s[p - l..t - l]).collect();
    let fit = ols_slices(y, &lags, true)?;
    Ok((fit.coefficients, fit.intercept, fit.residuals.into_inner()))
}

/// Order of the long autoregression used to proxy the innovations.
fn long_ar_order(t: usize, p: usize, q: usize) -> usize {
    let m = ((10.0 * (t as f64).log10()).ceil() as usize).min(t / 4);
    m.max(p + q + 1)
}

/// Innovation proxy from a long autoregression; `resid[k]` belongs to
/// observation `start + k`.
struct Proxy {
    start: usize,
    resid: Vec<f64>,
}

fn long_ar_proxy(s: &[f64], m: usize) -> Result<Proxy> {
    let (_, _, resid) = ar_ols(s, m)?;
    Ok(Proxy { start: m, resid })
}

fn shrink_into_circle(coeffs: &mut [f64], radius: f64) {
    let r = PROJECTED_RADIUS / radius;
    let mut f = 1.0;
    for c in coeffs.iter_mut() {
        f *= r;
        *c *= f;
    }
}

fn fit_arma_with_proxy(s: &[f64], order: ArmaOrder, proxy: &Proxy) -> Result<ArmaFit> {
    let ArmaOrder { p, q } = order;
    let t = s.len();
    let start = proxy.start + q;
    if t <= start + p + q + 2 {
        return Err(Error::TooShort { needed: start + p + q + 3, got: t });
    }
    // stage one: x_t on lagged x and lagged proxy residuals
    let y = &s[start..];
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p + q);
    for l in 1..=p {
        cols.push(s[start - l..t - l].to_vec());
    }
    for k in 1..=q {
        let from = start - k - proxy.start;
        cols.push(proxy.resid[from..from + y.len()].to_vec());
    }
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    let stage = ols_slices(y, &refs, true)?;
    let mut ar = stage.coefficients[..p].to_vec();
    let mut ma = stage.coefficients[p..].to_vec();
    let mut status = FitStatus::default();
    let ar_radius = companion_spectral_radius(&ar);
    if ar_radius >= STATIONARY_RADIUS {
        shrink_into_circle(&mut ar, ar_radius);
        status.projected = true;
    }
    let neg: Vec<f64> = ma.iter().map(|v| -v).collect();
    let ma_radius = companion_spectral_radius(&neg);
    if ma_radius >= STATIONARY_RADIUS {
        shrink_into_circle(&mut ma, ma_radius);
        status.projected = true;
    }
    let mut start_params = vec![stage.intercept];
    start_params.extend(&ar);
    start_params.extend(&ma);

    let problem = CssProblem { x: s, p, q };
    let out = problem.minimize(&start_params, CSS_MAX_ITER);
    status.iterations = out.iterations;
    let params = if out.converged {
        out.params
    } else {
        status.not_converged = true;
        start_params
    };
    let resid = problem.residuals(&params);
    finish(
        s,
        order,
        params[1..1 + p].to_vec(),
        params[1 + p..].to_vec(),
        params[0],
        resid,
        status,
    )
}

/// Fits an ARMA(p, q). With `q = 0` this is [`fit_ar`].
pub fn fit_arma(s: &Series, order: ArmaOrder) -> Result<ArmaFit> {
    if order.q == 0 {
        return fit_ar(s, order.p);
    }
    let t = s.len();
    let needed = 2 * (order.p + order.q) + 11;
    if t < needed {
        return Err(Error::TooShort { needed, got: t });
    }
    let proxy = long_ar_proxy(s, long_ar_order(t, order.p, order.q))?;
    fit_arma_with_proxy(s, order, &proxy)
}

/// Exhaustive BIC search over `0..=p_max` x `0..=q_max`. Ties go to the
/// smaller `p + q`, then the smaller `q`. Orders that cannot be fitted (too
/// short, singular) are skipped.
pub fn select_order(s: &Series, p_max: usize, q_max: usize) -> Result<ArmaFit> {
    let t = s.len();
    let mut proxy: Option<Proxy> = None;
    let mut best: Option<ArmaFit> = None;
    let mut first_err = None;
    for p in 0..=p_max {
        for q in 0..=q_max {
            let fit = if q == 0 {
                fit_ar(s, p)
            } else if t < 2 * (p + q) + 11 {
                Err(Error::TooShort { needed: 2 * (p + q) + 11, got: t })
            } else {
                if proxy.is_none() {
                    let m = long_ar_order(t, p_max, q_max).min((t.saturating_sub(2)) / 2);
                    proxy = Some(long_ar_proxy(s, m)?);
                }
                fit_arma_with_proxy(s, ArmaOrder::new(p, q), proxy.as_ref().unwrap())
            };
            match fit {
                Ok(f) => {
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            let key = |f: &ArmaFit| (f.order.p + f.order.q, f.order.q);
                            f.bic < b.bic || (f.bic == b.bic && key(&f) < key(b))
                        }
                    };
                    if better {
                        best = Some(f);
                    }
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
    }
    best.ok_or_else(|| first_err.unwrap_or(Error::InvalidInput("empty order grid".to_string())))
}

/// Residual panel produced by [`filter_panel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredPanel {
    /// Residual columns, all starting at input row `offset`.
    pub residuals: SeriesPanel,
    pub fits: Vec<ArmaFit>,
    /// Number of leading input rows without a residual in every column
    /// (`max_i p_i`).
    pub offset: usize,
    /// Sample standard deviation of each residual column. Residuals are
    /// returned unscaled; penalized regressions standardize internally.
    pub scales: Vec<f64>,
}

/// Replaces every column by the residuals of its BIC-selected ARMA model and
/// aligns the columns on their common sample.
pub fn filter_panel(panel: &SeriesPanel, p_max: usize, q_max: usize) -> Result<FilteredPanel> {
    let fits: Vec<ArmaFit> = panel
        .columns()
        .par_iter()
        .enumerate()
        .map(|(i, col)| {
            select_order(col, p_max, q_max).map_err(|e| Error::Column {
                column: i,
                name: panel.names()[i].clone(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let offset = fits.iter().map(|f| f.order.p).max().unwrap_or(0);
    let columns = fits
        .iter()
        .map(|f| Series::new(f.residuals[offset - f.order.p..].to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let scales = columns
        .iter()
        .map(|c| c.variance().map(f64::sqrt))
        .collect::<Result<Vec<_>>>()?;
    Ok(FilteredPanel {
        residuals: SeriesPanel::new(columns, panel.names().to_vec())?,
        fits,
        offset,
        scales,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_ar1_recursion() {
        let x: Vec<f64> = (0..30).map(|t| 0.5f64.powi(t)).collect();
        let f = fit_ar(&Series::new(x).unwrap(), 1).unwrap();
        assert!((f.ar[0] - 0.5).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-12);
    }

    #[test]
    fn mean_only_fit() {
        let s = Series::new(vec![1.0, 3.0, 2.0, 6.0]).unwrap();
        let f = select_order(&s, 0, 0).unwrap();
        assert_eq!(f.order, ArmaOrder::new(0, 0));
        assert_eq!(f.residuals.values(), &[-2.0, 0.0, -1.0, 3.0]);
        assert_eq!(f.intercept, 3.0);
    }

    #[test]
    fn shrink_places_roots_on_target_radius() {
        let mut a = vec![1.2, -0.1];
        let r = companion_spectral_radius(&a);
        shrink_into_circle(&mut a, r);
        assert!((companion_spectral_radius(&a) - PROJECTED_RADIUS).abs() < 1e-10);
    }
}
