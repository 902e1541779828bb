use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::armafilter::filter_panel;
use crate::dgp::MeanSd;
use crate::error::{Error, Result};
use crate::estimators::{split_penalty_lasso, LassoOptions};
use crate::statcore::{ols_slices, Series, SeriesPanel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ForecastMethod {
    /// Direct autoregression on the own lags of `y`.
    Ar,
    /// LASSO on the covariates and own lags.
    Lasso,
    /// LASSO on ARMA-filtered covariates and own lags.
    ULasso,
}

impl ForecastMethod {
    pub fn name(self) -> &'static str {
        match self {
            ForecastMethod::Ar => "AR",
            ForecastMethod::Lasso => "LASSO",
            ForecastMethod::ULasso => "uLASSO",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RollingConfig {
    /// Observations per estimation window, ending at the forecast origin.
    pub window: usize,
    pub horizon: usize,
    /// Own lags are chosen by BIC in `0..=y_lag_max`.
    pub y_lag_max: usize,
    /// ARMA order maxima of the covariate filter.
    pub p_max: usize,
    pub q_max: usize,
    /// Penalize the own lags in the LASSO designs; when false they enter
    /// unpenalized.
    pub penalize_y_lags: bool,
    pub lasso: LassoOptions,
}

impl Default for RollingConfig {
    fn default() -> Self {
        RollingConfig {
            window: 130,
            horizon: 24,
            y_lag_max: 12,
            p_max: 3,
            q_max: 3,
            penalize_y_lags: true,
            lasso: LassoOptions::default(),
        }
    }
}

impl RollingConfig {
    /// Forecast origins `window-1 ..= T-1-horizon` (0-based rows).
    pub fn origins(&self, t: usize) -> Result<std::ops::RangeInclusive<usize>> {
        if self.horizon == 0 {
            return Err(Error::InvalidInput("horizon must be at least 1".to_string()));
        }
        if self.window + self.horizon >= t {
            return Err(Error::TooShort { needed: self.window + self.horizon + 1, got: t });
        }
        if self.window < self.horizon + self.y_lag_max + 3 {
            return Err(Error::Domain(format!(
                "window {} too short for horizon {} and {} own lags",
                self.window, self.horizon, self.y_lag_max
            )));
        }
        Ok(self.window - 1..=t - 1 - self.horizon)
    }
}

/// Forecasts of one method over all origins. Entry `k` is the forecast made
/// at row `origins[k]` of the value realized at row `origins[k] + h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub method: ForecastMethod,
    pub horizon: usize,
    pub origins: Vec<usize>,
    pub predictions: Vec<f64>,
    pub actuals: Vec<f64>,
    /// Number of covariates with a nonzero coefficient (0 for AR).
    pub selected: Vec<usize>,
    /// Own lags used at each origin.
    pub y_lags: Vec<usize>,
}

impl ForecastResult {
    pub fn errors(&self) -> Vec<f64> {
        self.predictions.iter().zip(&self.actuals).map(|(p, a)| p - a).collect()
    }

    /// Row index of each forecast target.
    pub fn target_rows(&self) -> Vec<usize> {
        self.origins.iter().map(|o| o + self.horizon).collect()
    }
}

/// Root mean squared forecast error.
pub fn rmsfe(r: &ForecastResult) -> Result<f64> {
    if r.predictions.is_empty() {
        return Err(Error::InvalidInput("no forecasts to evaluate".to_string()));
    }
    let e = r.errors();
    Ok((e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64).sqrt())
}

/// Direct `h`-step forecasts of `y` itself.
pub fn rolling_forecast(
    y: &Series,
    panel: &SeriesPanel,
    method: ForecastMethod,
    cfg: &RollingConfig,
) -> Result<ForecastResult> {
    rolling_forecast_target(y, y, panel, method, cfg)
}

/// Direct `h`-step forecasts of `target`, all inputs aligned on the same
/// rows. At origin `t` the window holds rows `t-window+1 ..= t`; the
/// training pairs are (features at `s`, `target[s+h]`) for every `s` in the
/// window with `s + h <= t`, and the forecast applies the fitted equation
/// to the features at `t`. Features are `y_s, ..., y_{s-p+1}` plus, for
/// the LASSO methods, the covariates (or their filtered residuals) at `s`.
/// The own-lag order `p` is selected by BIC per window and shared by all
/// methods; filters and penalties are re-estimated per window.
pub fn rolling_forecast_target(
    target: &Series,
    y: &Series,
    panel: &SeriesPanel,
    method: ForecastMethod,
    cfg: &RollingConfig,
) -> Result<ForecastResult> {
    let t = y.len();
    if target.len() != t {
        return Err(Error::LengthMismatch { left: t, right: target.len() });
    }
    if method != ForecastMethod::Ar && panel.n_rows() != t {
        return Err(Error::LengthMismatch { left: t, right: panel.n_rows() });
    }
    let origins: Vec<usize> = cfg.origins(t)?.collect();
    let out: Vec<(f64, usize, usize)> = origins
        .par_iter()
        .map(|&o| forecast_at(target, y, panel, method, cfg, o))
        .collect::<Result<Vec<_>>>()?;
    Ok(ForecastResult {
        method,
        horizon: cfg.horizon,
        actuals: origins.iter().map(|o| target[o + cfg.horizon]).collect(),
        predictions: out.iter().map(|r| r.0).collect(),
        selected: out.iter().map(|r| r.1).collect(),
        y_lags: out.iter().map(|r| r.2).collect(),
        origins,
    })
}

/// BIC order of the direct autoregression in a window (rows `ws..=o`),
/// compared on the common sample of the largest order.
fn select_y_lags(target: &[f64], y: &[f64], ws: usize, o: usize, cfg: &RollingConfig) -> Result<usize> {
    let h = cfg.horizon;
    let first = ws + cfg.y_lag_max.saturating_sub(1);
    let rows: Vec<usize> = (first..=o - h).collect();
    let yt: Vec<f64> = rows.iter().map(|&s| target[s + h]).collect();
    let n = rows.len() as f64;
    let mut best: Option<(f64, usize)> = None;
    for p in 0..=cfg.y_lag_max {
        let cols: Vec<Vec<f64>> = (0..p).map(|k| rows.iter().map(|&s| y[s - k]).collect()).collect();
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        let fit = match ols_slices(&yt, &refs, true) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let bic = n * (fit.rss() / n).max(f64::MIN_POSITIVE).ln() + (p + 1) as f64 * n.ln();
        if best.is_none_or(|(b, _)| bic < b) {
            best = Some((bic, p));
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| Error::InvalidInput(format!("no feasible autoregression at origin {o}")))
}

fn forecast_at(
    target: &Series,
    y: &Series,
    panel: &SeriesPanel,
    method: ForecastMethod,
    cfg: &RollingConfig,
    o: usize,
) -> Result<(f64, usize, usize)> {
    let h = cfg.horizon;
    let ws = o + 1 - cfg.window;
    let p = select_y_lags(target, y, ws, o, cfg)?;
    let (covariates, first_covariate_row): (Vec<Vec<f64>>, usize) = match method {
        ForecastMethod::Ar => (Vec::new(), ws),
        ForecastMethod::Lasso => (
            panel.columns().iter().map(|c| c[ws..=o].to_vec()).collect(),
            ws,
        ),
        ForecastMethod::ULasso => {
            let f = filter_panel(&panel.slice_rows(ws..o + 1), cfg.p_max, cfg.q_max)?;
            let cols = f.residuals.into_columns().into_iter().map(|c| c.into_inner()).collect();
            (cols, ws + f.offset)
        }
    };
    // covariate value at row s
    let cov = |j: usize, s: usize| covariates[j][s - first_covariate_row];
    let first = first_covariate_row.max(ws + p.saturating_sub(1));
    if first + h > o {
        return Err(Error::TooShort { needed: first + h + 1, got: o + 1 });
    }
    let rows: Vec<usize> = (first..=o - h).collect();
    let yt: Vec<f64> = rows.iter().map(|&s| target[s + h]).collect();
    let lag_cols: Vec<Vec<f64>> = (0..p).map(|k| rows.iter().map(|&s| y[s - k]).collect()).collect();
    let lag_now: Vec<f64> = (0..p).map(|k| y[o - k]).collect();
    let lag_refs: Vec<&[f64]> = lag_cols.iter().map(|c| c.as_slice()).collect();

    if method == ForecastMethod::Ar {
        let fit = ols_slices(&yt, &lag_refs, true)?;
        let pred = fit.intercept + fit.coefficients.iter().zip(&lag_now).map(|(b, v)| b * v).sum::<f64>();
        return Ok((pred, 0, p));
    }
    let n = covariates.len();
    let x_cols: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|&s| cov(j, s)).collect()).collect();
    let x_refs: Vec<&[f64]> = x_cols.iter().map(|c| c.as_slice()).collect();
    let (_, xc, yc, b0) = split_penalty_lasso(&yt, &lag_refs, &x_refs, cfg.penalize_y_lags, &cfg.lasso)?;
    let pred = b0
        + xc.iter().enumerate().map(|(j, b)| b * cov(j, o)).sum::<f64>()
        + yc.iter().zip(&lag_now).map(|(b, v)| b * v).sum::<f64>();
    let selected = xc.iter().filter(|b| **b != 0.0).count();
    Ok((pred, selected, p))
}

/// Mean and standard deviation of the per-origin model sizes of LASSO and
/// filtered LASSO, and the ratios filtered over raw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionStats {
    pub lasso: MeanSd,
    pub ulasso: MeanSd,
    pub mean_ratio: f64,
    pub sd_ratio: f64,
}

pub fn selection_stats(lasso: &ForecastResult, ulasso: &ForecastResult) -> SelectionStats {
    let stats = |r: &ForecastResult| {
        MeanSd::from_values(&r.selected.iter().map(|&k| k as f64).collect::<Vec<_>>())
    };
    let (a, b) = (stats(lasso), stats(ulasso));
    SelectionStats { lasso: a, ulasso: b, mean_ratio: b.mean / a.mean, sd_ratio: b.sd / a.sd }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_count() {
        let cfg = RollingConfig { window: 40, horizon: 5, y_lag_max: 2, ..RollingConfig::default() };
        assert_eq!(cfg.origins(100).unwrap().count(), 100 - 40 - 5 + 1);
        assert!(cfg.origins(45).is_err());
    }

    #[test]
    fn rmsfe_by_hand() {
        let r = ForecastResult {
            method: ForecastMethod::Ar,
            horizon: 1,
            origins: vec![0, 1, 2, 3],
            predictions: vec![1.0, -1.0, 2.0, -2.0],
            actuals: vec![0.0; 4],
            selected: vec![0; 4],
            y_lags: vec![0; 4],
        };
        assert!((rmsfe(&r).unwrap() - 2.5f64.sqrt()).abs() < 1e-15);
    }
}
