use serde::{Deserialize, Serialize};

use crate::armafilter::{filter_panel, FilteredPanel};
use crate::error::{Error, Result};
use crate::statcore::{ols_slices, RegressionFit, Series, SeriesPanel};

/// A regressor of a lagged design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    /// `y_{t-k}`
    YLag(usize),
    /// `x_{col, t-lag}`
    Covariate { col: usize, lag: usize },
}

/// Lags entering a regression of `y_t` on its own lags and lags of every
/// covariate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagSpec {
    pub y_lags: Vec<usize>,
    pub x_lags: Vec<usize>,
}

impl LagSpec {
    pub fn new(y_lags: impl IntoIterator<Item = usize>, x_lags: impl IntoIterator<Item = usize>) -> Self {
        LagSpec {
            y_lags: y_lags.into_iter().collect(),
            x_lags: x_lags.into_iter().collect(),
        }
    }

    pub fn max_lag(&self) -> usize {
        self.y_lags.iter().chain(&self.x_lags).copied().max().unwrap_or(0)
    }

    pub fn terms(&self, n: usize) -> Vec<Term> {
        let mut terms: Vec<Term> = self.y_lags.iter().map(|&k| Term::YLag(k)).collect();
        for col in 0..n {
            terms.extend(self.x_lags.iter().map(|&lag| Term::Covariate { col, lag }));
        }
        terms
    }
}

/// Design matrix of a lagged regression: regressand rows `start..T`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaggedDesign {
    pub y: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
    pub terms: Vec<Term>,
    pub start: usize,
}

impl LaggedDesign {
    pub fn build(y: &[f64], x: &SeriesPanel, spec: &LagSpec) -> Result<Self> {
        if x.n_cols() > 0 && x.n_rows() != y.len() {
            return Err(Error::LengthMismatch { left: y.len(), right: x.n_rows() });
        }
        if spec.y_lags.contains(&0) {
            return Err(Error::InvalidInput("y lag 0 is the regressand".to_string()));
        }
        let t = y.len();
        let start = spec.max_lag();
        if t <= start {
            return Err(Error::TooShort { needed: start + 1, got: t });
        }
        let terms = spec.terms(x.n_cols());
        let columns = terms
            .iter()
            .map(|term| match *term {
                Term::YLag(k) => y[start - k..t - k].to_vec(),
                Term::Covariate { col, lag } => x.column(col)[start - lag..t - lag].to_vec(),
            })
            .collect();
        Ok(LaggedDesign {
            y: y[start..].to_vec(),
            columns,
            terms,
            start,
        })
    }

    pub fn column_refs(&self) -> Vec<&[f64]> {
        self.columns.iter().map(|c| c.as_slice()).collect()
    }

    pub fn as_panel(&self) -> Result<SeriesPanel> {
        let cols = self
            .columns
            .iter()
            .map(|c| Series::new(c.clone()))
            .collect::<Result<Vec<_>>>()?;
        let names = self.terms.iter().map(term_name).collect();
        SeriesPanel::new(cols, names)
    }
}

pub fn term_name(term: &Term) -> String {
    match *term {
        Term::YLag(k) => format!("y_lag{k}"),
        Term::Covariate { col, lag } => format!("x{}_lag{lag}", col + 1),
    }
}

/// Least-squares fit of a lagged design, with the term of every coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaggedFit {
    pub fit: RegressionFit,
    pub terms: Vec<Term>,
    /// First regressand row of the input series.
    pub start: usize,
}

impl LaggedFit {
    pub fn index_of(&self, term: Term) -> Option<usize> {
        self.terms.iter().position(|t| *t == term)
    }

    pub fn coef(&self, term: Term) -> Option<f64> {
        self.index_of(term).map(|i| self.fit.coefficients[i])
    }

    /// Coefficients of `x_{i, t-lag}` for `i = 0..n`.
    pub fn covariate_coefs(&self, n: usize, lag: usize) -> Option<Vec<f64>> {
        (0..n).map(|col| self.coef(Term::Covariate { col, lag })).collect()
    }
}

/// OLS with intercept of `y_t` on the lags listed in `spec`.
pub fn lagged_regression(y: &Series, x: &SeriesPanel, spec: &LagSpec) -> Result<LaggedFit> {
    let d = LaggedDesign::build(y, x, spec)?;
    let fit = ols_slices(&d.y, &d.column_refs(), true)?;
    Ok(LaggedFit { fit, terms: d.terms, start: d.start })
}

/// Dynamic regression of order `p`: `y_t` on `y_{t-1..t-p}` and
/// `x_{i,t}, ..., x_{i,t-p}` for every covariate, with intercept.
pub fn dynamic_regression(y: &Series, x: &SeriesPanel, p: usize) -> Result<LaggedFit> {
    let needed = (1 + x.n_cols()) * (p + 1) + 1;
    if y.len() <= needed {
        return Err(Error::TooShort { needed: needed + 1, got: y.len() });
    }
    lagged_regression(y, x, &LagSpec::new(1..=p, 0..=p))
}

/// Options of the filtered-residual regressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UOptions {
    /// Number of own lags of `y` in the design.
    pub y_lags: usize,
    /// Lag of the filtered residuals `u_hat_{i, t - covariate_lag}`.
    pub covariate_lag: usize,
    pub p_max: usize,
    pub q_max: usize,
}

impl Default for UOptions {
    fn default() -> Self {
        UOptions { y_lags: 1, covariate_lag: 1, p_max: 3, q_max: 3 }
    }
}

/// Filtered residuals and the response restricted to their sample.
pub(crate) fn filtered_inputs(
    y: &Series,
    panel: &SeriesPanel,
    opts: &UOptions,
) -> Result<(FilteredPanel, Series)> {
    if panel.n_rows() != y.len() {
        return Err(Error::LengthMismatch { left: y.len(), right: panel.n_rows() });
    }
    let filtered = filter_panel(panel, opts.p_max, opts.q_max)?;
    let y_cut = y.slice(filtered.offset..y.len());
    Ok((filtered, y_cut))
}

/// OLS of `y_t` on `u_hat_{i,t-lag}` (residuals of per-column ARMA filters
/// selected by BIC) and `y_{t-1..t-y_lags}`, with intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UOlsFit {
    pub fit: LaggedFit,
    pub filtered: FilteredPanel,
}

impl UOlsFit {
    /// Coefficients of the filtered covariates.
    pub fn u_coefficients(&self, covariate_lag: usize) -> Vec<f64> {
        self.fit
            .covariate_coefs(self.filtered.fits.len(), covariate_lag)
            .expect("design contains every covariate")
    }
}

pub fn u_ols(y: &Series, panel: &SeriesPanel, opts: &UOptions) -> Result<UOlsFit> {
    let (filtered, y_cut) = filtered_inputs(y, panel, opts)?;
    let spec = LagSpec::new(1..=opts.y_lags, [opts.covariate_lag]);
    let fit = lagged_regression(&y_cut, &filtered.residuals, &spec)?;
    Ok(UOlsFit { fit, filtered })
}
