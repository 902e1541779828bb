//! Monte Carlo experiments. Replication `r` draws from
//! `ReplicationSeed::new(base_seed, r)`; replications run on the rayon pool
//! and are collected in index order, so summaries do not depend on the
//! number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::arma::{simulate_panel, ArmaDgpSpec};
use super::designs::{scenario_design, sparse_design};
use super::innovations::{gen_innovations, InnovationSpec};
use super::rng::ReplicationSeed;
use super::summary::{Histogram, McCell, McSummary};
use crate::error::{Error, Result};
use crate::estimators::{
    cochrane_orcutt, coef_error, fit_lagged_lasso, lagged_regression, nw_se, u_lasso, u_ols,
    CoOptions, HacOptions, LagSpec, LassoOptions, Term, ULassoOptions, UOptions,
};
use crate::statcore::{
    correlation_matrix, max_offdiag_abs, min_eigenvalue, ols_slices, sample_correlation,
    SeriesPanel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub replications: usize,
    pub t: usize,
    pub base_seed: u64,
    pub burn_in: usize,
}

impl McConfig {
    pub fn new(replications: usize, t: usize, base_seed: u64) -> Self {
        McConfig { replications, t, base_seed, burn_in: super::arma::DEFAULT_BURN_IN }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidInput("replications must be at least 1".to_string()));
        }
        if self.t < 4 {
            return Err(Error::TooShort { needed: 4, got: self.t });
        }
        Ok(())
    }

    pub fn seed(&self, replication: usize) -> ReplicationSeed {
        ReplicationSeed::new(self.base_seed, replication as u64)
    }
}

/// Runs `f` for every replication and returns the results in replication
/// order.
pub fn run_replications<R, F>(cfg: &McConfig, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(ReplicationSeed) -> R + Sync,
{
    (0..cfg.replications).into_par_iter().map(|r| f(cfg.seed(r))).collect()
}

/// Number of histogram bins used for correlation densities on `[-1, 1]`.
pub const CORR_BINS: usize = 101;

fn column<const K: usize>(rows: &[[f64; K]], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k]).collect()
}

fn summary(name: &str, cfg: &McConfig, cells: Vec<McCell>) -> McSummary {
    McSummary {
        experiment: name.to_string(),
        replications: cfg.replications,
        base_seed: cfg.base_seed,
        cells,
    }
}

fn param(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

/// Sample correlation of a two-column design across replications.
///
/// Metrics `corr` and `abs_corr`; histogram on `[-1, 1]` with
/// [`CORR_BINS`] bins; the raw draws are kept. A failed replication
/// (degenerate sample) contributes NaN and is skipped by the moments.
pub fn mc_corr_density(cfg: &McConfig, dgp: &ArmaDgpSpec, innov: &InnovationSpec) -> Result<McSummary> {
    cfg.validate()?;
    if dgp.n() != 2 {
        return Err(Error::InvalidInput(format!("expected 2 columns, got {}", dgp.n())));
    }
    dgp.validate()?;
    innov.validate(2)?;
    let draws = run_replications(cfg, |seed| {
        simulate_panel(dgp, innov, cfg.t, cfg.burn_in, &seed)
            .and_then(|p| sample_correlation(p.column(0), p.column(1)))
            .unwrap_or(f64::NAN)
    });
    let abs: Vec<f64> = draws.iter().map(|c| c.abs()).collect();
    let mut cell = McCell::new(vec![param("T", cfg.t)]);
    cell.push("corr", &draws);
    cell.push("abs_corr", &abs);
    cell.histogram = Some(Histogram::new(&draws, -1.0, 1.0, CORR_BINS));
    cell.draws = Some(draws);
    Ok(summary("corr_density", cfg, vec![cell]))
}

/// Largest absolute off-diagonal entry and smallest eigenvalue of the
/// sample correlation matrix of `n` independent Gaussian AR(1) series with
/// a common coefficient `phi`.
pub fn mc_eigen_stats(cfg: &McConfig, n: usize, phi: f64) -> Result<McSummary> {
    cfg.validate()?;
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 series, got {n}")));
    }
    let dgp = ArmaDgpSpec::ar1_panel(n, phi);
    dgp.validate()?;
    let innov = InnovationSpec::gaussian();
    let rows = run_replications(cfg, |seed| {
        let stats = simulate_panel(&dgp, &innov, cfg.t, cfg.burn_in, &seed)
            .and_then(|p| correlation_matrix(&p))
            .and_then(|c| Ok([max_offdiag_abs(&c)?, min_eigenvalue(&c, None)?]));
        stats.unwrap_or([f64::NAN; 2])
    });
    let mut cell = McCell::new(vec![param("n", n), param("phi", phi), param("T", cfg.t)]);
    cell.push("max_abs_corr", &column(&rows, 0));
    cell.push("min_eigenvalue", &column(&rows, 1));
    Ok(summary("eigen_stats", cfg, vec![cell]))
}

/// Estimators compared on the two-covariate regression designs.
pub const TABLE_METHODS: [&str; 4] = ["NW", "CO", "DynReg", "uOLS"];

/// Coefficient estimates, standard errors and R^2 of one method.
struct MethodResult {
    alpha: Vec<f64>,
    t_stats: Vec<f64>,
    r2: f64,
}

fn two_sided_p(t: f64) -> f64 {
    let z = Normal::standard();
    2.0 * (1.0 - z.cdf(t.abs()))
}

fn table_replication(
    scenario: u8,
    cfg: &McConfig,
    u: &UOptions,
    seed: &ReplicationSeed,
) -> Result<Vec<Result<MethodResult>>> {
    let design = scenario_design(scenario)?;
    let sample = design.simulate(cfg.t, cfg.burn_in, seed)?;
    let (y, x) = (&sample.y, &sample.x);
    let n = x.n_cols();
    let t = y.len();
    let lag1 = |fit: &crate::estimators::LaggedFit| -> Result<(Vec<f64>, Vec<f64>)> {
        let idx: Vec<usize> = (0..n)
            .map(|col| fit.index_of(Term::Covariate { col, lag: 1 }).expect("lag 1 in design"))
            .collect();
        Ok((
            idx.iter().map(|&i| fit.fit.coefficients[i]).collect(),
            idx.iter().map(|&i| fit.fit.t_stats[i]).collect(),
        ))
    };

    // NW: least squares on (y_{t-1}, x_{t-1}) with HAC standard errors
    let nw = (|| {
        let fit = lagged_regression(y, x, &LagSpec::new([1], [1]))?;
        let d = crate::estimators::LaggedDesign::build(y, x, &LagSpec::new([1], [1]))?;
        let m = HacOptions::default().bandwidth_for(d.y.len());
        let adjusted = fit.fit.clone().with_se(nw_se(&fit.fit, &d.column_refs(), m)?);
        let fit = crate::estimators::LaggedFit { fit: adjusted, ..fit };
        let (alpha, t_stats) = lag1(&fit)?;
        Ok(MethodResult { alpha, t_stats, r2: fit.fit.r_squared })
    })();

    let co = (|| {
        let ys = y.slice(1..t);
        let xs = x.slice_rows(0..t - 1);
        let fit = cochrane_orcutt(&ys, &xs, &CoOptions::default())?;
        Ok(MethodResult {
            alpha: fit.fit.coefficients.clone(),
            t_stats: fit.fit.t_stats.clone(),
            r2: fit.fit.r_squared,
        })
    })();

    let dr = (|| {
        let p = if scenario == 3 { 2 } else { 1 };
        let fit = lagged_regression(y, x, &LagSpec::new(1..=p, 1..=p + 1))?;
        let (alpha, t_stats) = lag1(&fit)?;
        Ok(MethodResult { alpha, t_stats, r2: fit.fit.r_squared })
    })();

    let uo = (|| {
        let fit = u_ols(y, x, &UOptions { y_lags: 1, covariate_lag: 1, ..*u })?;
        let (alpha, t_stats) = lag1(&fit.fit)?;
        Ok(MethodResult { alpha, t_stats, r2: fit.fit.fit.r_squared })
    })();

    Ok(vec![nw, co, dr, uo])
}

/// Coefficient error `||alpha_hat - alpha||_2`, R^2, per-coefficient
/// estimates and normal p-values of the four estimators on regression
/// scenario 1, 2 or 3, one cell per method. Filtered regressions use the
/// ARMA order maxima of `u`.
///
/// Metric `failed` is the share of replications in which a method could
/// not be computed; the other metrics skip those replications.
pub fn mc_estimator_table_with(cfg: &McConfig, scenario: u8, u: &UOptions) -> Result<McSummary> {
    cfg.validate()?;
    let design = scenario_design(scenario)?;
    let truth = design.response.alpha.clone();
    let n = truth.len();
    let reps = run_replications(cfg, |seed| table_replication(scenario, cfg, u, &seed));
    let mut cells = Vec::with_capacity(TABLE_METHODS.len());
    for (k, method) in TABLE_METHODS.iter().enumerate() {
        let results: Vec<Option<&MethodResult>> = reps
            .iter()
            .map(|r| r.as_ref().ok().and_then(|v| v[k].as_ref().ok()))
            .collect();
        let pick = |f: &dyn Fn(&MethodResult) -> f64| -> Vec<f64> {
            results.iter().map(|r| r.map_or(f64::NAN, f)).collect()
        };
        let mut cell = McCell::new(vec![
            param("scenario", scenario),
            param("T", cfg.t),
            param("method", method),
        ]);
        cell.push("coef_err", &pick(&|m| coef_error(&m.alpha, &truth).unwrap_or(f64::NAN)));
        cell.push("r2", &pick(&|m| m.r2));
        for i in 0..n {
            cell.push(format!("alpha{}_hat", i + 1), &pick(&|m| m.alpha[i]));
            cell.push(format!("alpha{}_abs_err", i + 1), &pick(&|m| (m.alpha[i] - truth[i]).abs()));
            cell.push(format!("alpha{}_pvalue", i + 1), &pick(&|m| two_sided_p(m.t_stats[i])));
        }
        let failed: Vec<f64> = results.iter().map(|r| if r.is_some() { 0.0 } else { 1.0 }).collect();
        cell.push("failed", &failed);
        cells.push(cell);
    }
    Ok(summary("estimator_table", cfg, cells))
}

pub fn mc_estimator_table(cfg: &McConfig, scenario: u8) -> Result<McSummary> {
    mc_estimator_table_with(cfg, scenario, &UOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoRatioOptions {
    /// Number of relevant covariates (unit coefficients).
    pub sparsity: usize,
    /// ARMA order maxima of the filter; the lag fields are ignored.
    pub u: UOptions,
    pub lasso: LassoOptions,
    /// Restrict the eigenvalue to the relevant covariates. `None` restricts
    /// when `n >= T`, where the full sample correlation matrix is singular.
    pub restrict_support: Option<bool>,
    /// Penalize the own lag in the filtered design; when false it enters
    /// unpenalized.
    pub penalize_y_lags: bool,
}

impl Default for LassoRatioOptions {
    fn default() -> Self {
        LassoRatioOptions {
            sparsity: 10,
            u: UOptions::default(),
            lasso: LassoOptions::default(),
            restrict_support: None,
            penalize_y_lags: true,
        }
    }
}

/// Filtered versus raw LASSO on the sparse design with `n` covariates.
///
/// Per replication: the smallest eigenvalue of the sample correlation
/// matrix of the filtered residuals and of the raw covariates, and the
/// coefficient errors of the BIC-tuned LASSO of `y_t` on `u_hat_{t-1}` and
/// `y_{t-1}` versus that of `y_t` on `x_{t-1}`. Metrics are the ratios
/// (filtered over raw), their components and the selected model sizes.
pub fn mc_lasso_ratios_with(cfg: &McConfig, n: usize, phi: f64, opts: &LassoRatioOptions) -> Result<McSummary> {
    cfg.validate()?;
    let design = sparse_design(n, phi, opts.sparsity)?;
    design.covariates.validate()?;
    let truth = design.response.alpha.clone();
    let support: Vec<usize> = (0..opts.sparsity).collect();
    let restrict = opts.restrict_support.unwrap_or(n >= cfg.t);
    let x_opts = UOptions { y_lags: 0, covariate_lag: 1, ..opts.u };
    let u_opts = ULassoOptions {
        u: UOptions { y_lags: 1, covariate_lag: 1, ..opts.u },
        penalize_y_lags: opts.penalize_y_lags,
        lasso: opts.lasso,
    };
    let rows = run_replications(cfg, |seed| {
        let run = || -> Result<[f64; 6]> {
            let sample = design.simulate(cfg.t, cfg.burn_in, &seed)?;
            let eig = |p: &SeriesPanel| -> Result<f64> {
                let c = correlation_matrix(p)?;
                min_eigenvalue(&c, restrict.then_some(support.as_slice()))
            };
            let (_, xc, _, _, _) = fit_lagged_lasso(&sample.y, &sample.x, &x_opts, true, &opts.lasso)?;
            let uf = u_lasso(&sample.y, &sample.x, &u_opts)?;
            let nsel_x = xc.iter().filter(|b| **b != 0.0).count() as f64;
            Ok([
                eig(&sample.x)?,
                eig(&uf.filtered.residuals)?,
                coef_error(&xc, &truth)?,
                coef_error(&uf.u_coefficients, &truth)?,
                nsel_x,
                uf.n_selected() as f64,
            ])
        };
        run().unwrap_or([f64::NAN; 6])
    });
    let ratio = |a: usize, b: usize| -> Vec<f64> { rows.iter().map(|r| r[a] / r[b]).collect() };
    let mut cell = McCell::new(vec![param("n", n), param("phi", phi), param("T", cfg.t)]);
    cell.push("eig_ratio", &ratio(1, 0));
    cell.push("err_ratio", &ratio(3, 2));
    for (k, name) in ["eig_x", "eig_u", "err_x", "err_u", "nsel_x", "nsel_u"].iter().enumerate() {
        cell.push(*name, &column(&rows, k));
    }
    Ok(summary("lasso_ratios", cfg, vec![cell]))
}

pub fn mc_lasso_ratios(cfg: &McConfig, n: usize, phi: f64) -> Result<McSummary> {
    mc_lasso_ratios_with(cfg, n, phi, &LassoRatioOptions::default())
}

/// Methods of the spurious-regression experiment.
pub const TSTAT_METHODS: [&str; 5] = ["OLS", "NW", "CO", "DynReg", "uOLS"];

fn tstat_replication(phi: f64, cfg: &McConfig, u: &UOptions, seed: &ReplicationSeed) -> [f64; 5] {
    let dgp = ArmaDgpSpec::ar1_panel(2, phi);
    let Ok(p) = simulate_panel(&dgp, &InnovationSpec::gaussian(), cfg.t, cfg.burn_in, seed) else {
        return [f64::NAN; 5];
    };
    let x2 = p.column(1);
    let x1 = p.select(&[0]).expect("column 0 exists");
    let x1v: &[f64] = p.column(0);
    let ols_t = ols_slices(x2, &[x1v], true);
    let t_ols = ols_t.as_ref().map(|f| f.t_stats[0]).unwrap_or(f64::NAN);
    let t_nw = ols_t
        .as_ref()
        .ok()
        .and_then(|f| {
            let m = HacOptions::default().bandwidth_for(cfg.t);
            nw_se(f, &[x1v], m).ok().map(|se| f.coefficients[0] / se[0])
        })
        .unwrap_or(f64::NAN);
    let t_co = cochrane_orcutt(x2, &x1, &CoOptions::default())
        .map(|f| f.fit.t_stats[0])
        .unwrap_or(f64::NAN);
    let t_dr = lagged_regression(x2, &x1, &LagSpec::new([1], [0, 1]))
        .ok()
        .and_then(|f| f.index_of(Term::Covariate { col: 0, lag: 0 }).map(|i| f.fit.t_stats[i]))
        .unwrap_or(f64::NAN);
    let t_u = u_ols(x2, &x1, &UOptions { y_lags: 1, covariate_lag: 0, ..*u })
        .ok()
        .and_then(|f| f.fit.index_of(Term::Covariate { col: 0, lag: 0 }).map(|i| f.fit.fit.t_stats[i]))
        .unwrap_or(f64::NAN);
    [t_ols, t_nw, t_co, t_dr, t_u]
}

/// Spurious-regression rates: `x_2` regressed on an independent `x_1`, both
/// Gaussian AR(1) with coefficient `phi`, for `T = cfg.t`. For every method
/// the metric `reject_<method>` is the indicator `|t| > 1.96` (its mean is
/// the rejection rate) and `t_<method>` the t-statistic of `x_1`.
///
/// OLS and NW regress `x_{2t}` on `x_{1t}`; CO iterates on the same
/// equation; DynReg adds `x_{2,t-1}` and `x_{1,t-1}`; the filtered
/// regression uses `u_hat_{1t}` and `x_{2,t-1}`.
pub fn mc_tstat_rates_with(cfg: &McConfig, phi: f64, u: &UOptions) -> Result<McSummary> {
    cfg.validate()?;
    ArmaDgpSpec::ar1_panel(2, phi).validate()?;
    let rows = run_replications(cfg, |seed| tstat_replication(phi, cfg, u, &seed));
    let mut cell = McCell::new(vec![param("phi", phi), param("T", cfg.t)]);
    for (k, method) in TSTAT_METHODS.iter().enumerate() {
        let t = column(&rows, k);
        let reject: Vec<f64> = t
            .iter()
            .map(|v| if v.is_finite() { f64::from(u8::from(v.abs() > 1.96)) } else { f64::NAN })
            .collect();
        cell.push(format!("reject_{method}"), &reject);
        cell.push(format!("t_{method}"), &t);
    }
    Ok(summary("tstat_rates", cfg, vec![cell]))
}

pub fn mc_tstat_rates(cfg: &McConfig, phi: f64) -> Result<McSummary> {
    mc_tstat_rates_with(cfg, phi, &UOptions::default())
}

/// `(1/(T-1)) sum u_1t u_2t` for independent standard normal pairs. The
/// histogram spans six null standard deviations on each side.
pub fn mc_product_normal(cfg: &McConfig) -> Result<McSummary> {
    cfg.validate()?;
    let innov = InnovationSpec::gaussian();
    let draws = run_replications(cfg, |seed| {
        gen_innovations(&innov, cfg.t, 2, &seed, 0)
            .map(|u| {
                let s: f64 = u.column(0).iter().zip(u.column(1).iter()).map(|(a, b)| a * b).sum();
                s / (cfg.t - 1) as f64
            })
            .unwrap_or(f64::NAN)
    });
    let half = 6.0 / ((cfg.t - 1) as f64).sqrt();
    let mut cell = McCell::new(vec![param("T", cfg.t)]);
    cell.push("mean_product", &draws);
    cell.histogram = Some(Histogram::new(&draws, -half, half, CORR_BINS));
    cell.draws = Some(draws);
    Ok(summary("product_normal", cfg, vec![cell]))
}

/// Slope `b` of `x_2` on `x_1` (with intercept) for independent Gaussian
/// AR(1) series, with the residual sum of squares `v`, the classical OLS
/// variance of `b` (`var_ols`) and its Newey-West counterpart (`var_nw`,
/// rule-of-thumb bandwidth). Draws of `b` are kept.
pub fn mc_b_distribution(cfg: &McConfig, phi1: f64, phi2: f64) -> Result<McSummary> {
    cfg.validate()?;
    let dgp = ArmaDgpSpec::new(vec![
        super::arma::ArmaProcess::ar1(phi1),
        super::arma::ArmaProcess::ar1(phi2),
    ]);
    dgp.validate()?;
    let innov = InnovationSpec::gaussian();
    let m = HacOptions::default().bandwidth_for(cfg.t);
    let rows = run_replications(cfg, |seed| {
        let run = || -> Result<[f64; 4]> {
            let p = simulate_panel(&dgp, &innov, cfg.t, cfg.burn_in, &seed)?;
            let x1: &[f64] = p.column(0);
            let fit = ols_slices(p.column(1), &[x1], true)?;
            let nw = nw_se(&fit, &[x1], m)?[0];
            Ok([fit.coefficients[0], fit.rss(), fit.se_classical[0].powi(2), nw * nw])
        };
        run().unwrap_or([f64::NAN; 4])
    });
    let b = column(&rows, 0);
    let mut cell = McCell::new(vec![param("phi1", phi1), param("phi2", phi2), param("T", cfg.t)]);
    cell.push("b", &b);
    cell.push("v", &column(&rows, 1));
    cell.push("var_ols", &column(&rows, 2));
    cell.push("var_nw", &column(&rows, 3));
    cell.draws = Some(b);
    Ok(summary("b_distribution", cfg, vec![cell]))
}

/// Empirical CDF of `draws` (non-finite values dropped) compared with
/// `cdf`: the Kolmogorov-Smirnov distance `sup |F_n - F|`.
pub fn ks_distance(draws: &[f64], cdf: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut v: Vec<f64> = draws.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return Err(Error::InvalidInput("no finite draws".to_string()));
    }
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    Ok(d)
}
