use std::path::PathBuf;

use serde_json::json;

use sercorr::dgp::{
    ks_distance, mc_corr_density, mc_eigen_stats, mc_estimator_table_with, mc_lasso_ratios_with,
    mc_tstat_rates_with, ArmaDgpSpec, ArmaProcess, InnovationSpec, LassoRatioOptions, McConfig, McSummary,
    TSTAT_METHODS,
};
use sercorr::estimators::UOptions;
use sercorr::forecast::{
    dm_test, rmsfe, rolling_forecast_target, selection_stats, target_transform, ForecastMethod,
    ForecastResult, RollingConfig,
};
use sercorr::statcore::Series;
use sercorr::theory::{corr_cdf, density_grid, Ar1PairSpec};

use crate::config::FileConfig;
use crate::error::CliError;
use crate::ingest::{ingest, read_raw, transform};
use crate::manifest::RunWriter;
use crate::{Cli, Command};

const DEFAULT_SEED: u64 = 1;
const DEFAULT_PHI_GRID: [f64; 5] = [0.0, 0.3, 0.6, 0.9, 0.95];

/// Settings shared by the simulation commands.
struct Common {
    out: PathBuf,
    seed: u64,
    reps: usize,
    p_max: usize,
    q_max: usize,
}

impl Common {
    fn resolve(cli: &Cli, file: &FileConfig) -> Result<Self, CliError> {
        let g = &cli.global;
        let full = file.flag(g.full_scale, "full-scale")?;
        let out = match file.pick(g.out.clone(), "out")? {
            Some(p) => p,
            None => std::env::var_os("SERCORR_OUT")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("sercorr-out")),
        };
        let reps = file.pick_or(g.reps, "reps", if full { 5000 } else { 500 })?;
        if reps == 0 {
            return Err(CliError::Usage("--reps must be at least 1".to_string()));
        }
        let max_order = if full { 12 } else { 3 };
        Ok(Common {
            out,
            seed: file.pick_or(g.seed, "seed", DEFAULT_SEED)?,
            reps,
            p_max: file.pick_or(g.p_max, "p-max", max_order)?,
            q_max: file.pick_or(g.q_max, "q-max", max_order)?,
        })
    }

    fn mc(&self, t: usize) -> McConfig {
        McConfig::new(self.reps, t, self.seed)
    }

    fn u_options(&self) -> UOptions {
        UOptions { p_max: self.p_max, q_max: self.q_max, ..UOptions::default() }
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "seed": self.seed,
            "reps": self.reps,
            "p_max": self.p_max,
            "q_max": self.q_max,
            "out": self.out.display().to_string(),
        })
    }
}

fn check_phi(phis: &[f64]) -> Result<(), CliError> {
    match phis.iter().find(|p| p.abs() >= 1.0 || p.is_nan()) {
        Some(p) => Err(CliError::Usage(format!("phi = {p} must satisfy |phi| < 1"))),
        None => Ok(()),
    }
}

fn check_t(t: usize, min: usize) -> Result<(), CliError> {
    if t < min {
        return Err(CliError::Usage(format!("--T must be at least {min}, got {t}")));
    }
    Ok(())
}

fn merge(experiment: &str, cfg: &McConfig, parts: Vec<McSummary>) -> McSummary {
    McSummary {
        experiment: experiment.to_string(),
        replications: cfg.replications,
        base_seed: cfg.base_seed,
        cells: parts.into_iter().flat_map(|s| s.cells).collect(),
    }
}

fn with_common(echo: serde_json::Value, common: &Common) -> serde_json::Value {
    let mut v = common.echo();
    if let (Some(a), Some(b)) = (v.as_object_mut(), echo.as_object()) {
        a.extend(b.clone());
    }
    v
}

pub fn dispatch(cli: &Cli, file: &FileConfig) -> Result<(), CliError> {
    match &cli.command {
        Command::Density(a) => {
            let c = Common::resolve(cli, file)?;
            let t = file
                .pick(a.t, "T")?
                .ok_or_else(|| CliError::Usage("missing required --T".to_string()))?;
            let phi = file.pick_list(a.phi.clone(), "phi")?.unwrap_or_else(|| vec![0.0, 0.0]);
            if phi.len() != 2 {
                return Err(CliError::Usage("--phi takes exactly two values".to_string()));
            }
            check_phi(&phi)?;
            check_t(t, 4)?;
            let points = file.pick_or(a.points, "points", sercorr::theory::DEFAULT_GRID_POINTS)?;
            if points < 3 {
                return Err(CliError::Usage("--points must be at least 3".to_string()));
            }
            let spec = Ar1PairSpec::new(phi[0], phi[1], t)?;
            let grid = density_grid(&spec, points)?;
            let cfg = c.mc(t);
            let dgp = ArmaDgpSpec::new(vec![ArmaProcess::ar1(phi[0]), ArmaProcess::ar1(phi[1])]);
            let mc = mc_corr_density(&cfg, &dgp, &InnovationSpec::gaussian())?;
            let cell = &mc.cells[0];
            let ks = ks_distance(cell.draws.as_deref().unwrap_or(&[]), |x| corr_cdf(x, &spec))?;
            let mut w = RunWriter::new(&c.out, "density")?;
            w.write("density_theory.csv", &grid.to_csv())?;
            w.write(
                "density_mc.csv",
                &cell.histogram.as_ref().expect("histogram is recorded").to_csv(),
            )?;
            w.write("density_mc.json", &mc.to_json())?;
            println!("T = {t}, phi = ({}, {}), {} replications: KS distance {ks:.4}", phi[0], phi[1], c.reps);
            w.finish(with_common(json!({"T": t, "phi": phi, "points": points, "ks": ks}), &c))?;
        }
        Command::ToyEigen(a) => {
            let c = Common::resolve(cli, file)?;
            let n = file.pick_or(a.n, "n", 10)?;
            let t = file.pick_or(a.t, "T", 100)?;
            let phis = file.pick_list(a.phi.clone(), "phi")?.unwrap_or_else(|| DEFAULT_PHI_GRID.to_vec());
            check_phi(&phis)?;
            check_t(t, 4)?;
            if n < 2 {
                return Err(CliError::Usage("--n must be at least 2".to_string()));
            }
            let cfg = c.mc(t);
            let parts = phis
                .iter()
                .map(|&p| mc_eigen_stats(&cfg, n, p))
                .collect::<Result<Vec<_>, _>>()?;
            let s = merge("eigen_stats", &cfg, parts);
            let mut w = RunWriter::new(&c.out, "toy-eigen")?;
            w.write("eigen_stats.csv", &s.to_csv())?;
            w.write("eigen_stats.json", &s.to_json())?;
            print!("{}", s.to_csv());
            w.finish(with_common(json!({"n": n, "T": t, "phi": phis}), &c))?;
        }
        Command::Estimators(a) => {
            let c = Common::resolve(cli, file)?;
            let scenario = file.pick_or(a.scenario, "scenario", 1)?;
            let t = file.pick_or(a.t, "T", 100)?;
            if !(1..=3).contains(&scenario) {
                return Err(CliError::Usage(format!("--scenario must be 1, 2 or 3, got {scenario}")));
            }
            check_t(t, 50)?;
            let cfg = c.mc(t);
            let s = mc_estimator_table_with(&cfg, scenario, &c.u_options())?;
            let mut w = RunWriter::new(&c.out, "estimators")?;
            w.write("estimators.csv", &s.to_csv())?;
            w.write("estimators.json", &s.to_json())?;
            println!("method  ave_err  sd_err  ave_R2");
            for cell in &s.cells {
                let e = cell.metric("coef_err").expect("metric recorded");
                let r = cell.metric("r2").expect("metric recorded");
                println!(
                    "{:<7} {:.4}   {:.4}  {:.4}",
                    cell.param("method").unwrap_or(""),
                    e.mean,
                    e.sd,
                    r.mean
                );
            }
            w.finish(with_common(json!({"scenario": scenario, "T": t}), &c))?;
        }
        Command::LassoSim(a) => {
            let c = Common::resolve(cli, file)?;
            let n = file.pick_or(a.n, "n", 50)?;
            let t = file.pick_or(a.t, "T", 100)?;
            let sparsity = file.pick_or(a.sparsity, "sparsity", 10)?;
            let phis = file.pick_list(a.phi.clone(), "phi")?.unwrap_or_else(|| DEFAULT_PHI_GRID.to_vec());
            check_phi(&phis)?;
            check_t(t, 30)?;
            if sparsity == 0 || sparsity > n {
                return Err(CliError::Usage(format!("--sparsity must be in 1..={n}")));
            }
            let cfg = c.mc(t);
            let opts = LassoRatioOptions { sparsity, u: c.u_options(), ..LassoRatioOptions::default() };
            let parts = phis
                .iter()
                .map(|&p| mc_lasso_ratios_with(&cfg, n, p, &opts))
                .collect::<Result<Vec<_>, _>>()?;
            let s = merge("lasso_ratios", &cfg, parts);
            let mut w = RunWriter::new(&c.out, "lasso-sim")?;
            w.write("lasso_ratios.csv", &s.to_csv())?;
            w.write("lasso_ratios.json", &s.to_json())?;
            print!("{}", s.to_csv());
            w.finish(with_common(json!({"n": n, "T": t, "phi": phis, "sparsity": sparsity}), &c))?;
        }
        Command::Tstat(a) => {
            let c = Common::resolve(cli, file)?;
            let ts = file.pick_list(a.t.clone(), "T")?.unwrap_or_else(|| vec![100]);
            let phis = file.pick_list(a.phi.clone(), "phi")?.unwrap_or_else(|| DEFAULT_PHI_GRID.to_vec());
            check_phi(&phis)?;
            for &t in &ts {
                check_t(t, 30)?;
            }
            let mut parts = Vec::new();
            let mut table = String::from("T,phi");
            for m in TSTAT_METHODS {
                table.push_str(&format!(",rate_{m}"));
            }
            table.push('\n');
            for &t in &ts {
                for &p in &phis {
                    let s = mc_tstat_rates_with(&c.mc(t), p, &c.u_options())?;
                    table.push_str(&format!("{t},{p}"));
                    for m in TSTAT_METHODS {
                        let r = s.cells[0].metric(&format!("reject_{m}")).expect("metric recorded");
                        table.push_str(&format!(",{}", 100.0 * r.mean));
                    }
                    table.push('\n');
                    parts.push(s);
                }
            }
            let s = merge("tstat_rates", &c.mc(ts[0]), parts);
            let mut w = RunWriter::new(&c.out, "tstat")?;
            w.write("tstat.csv", &table)?;
            w.write("tstat.json", &s.to_json())?;
            print!("{table}");
            w.finish(with_common(json!({"T": ts, "phi": phis}), &c))?;
        }
        Command::Forecast(a) => forecast(cli, file, a)?,
        Command::IngestCheck(a) => {
            let c = Common::resolve(cli, file)?;
            let data = file
                .pick(a.data.clone(), "data")?
                .ok_or_else(|| CliError::Usage("missing required --data".to_string()))?;
            let ing = ingest(&data)?;
            let report = ing.report();
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            let mut w = RunWriter::new(&c.out, "ingest-check")?;
            w.write("ingest_report.json", &text)?;
            println!(
                "{} series, {} rows read, {} aligned rows ({} dropped), {} to {}",
                report.columns,
                report.raw_rows,
                report.aligned_rows,
                report.rows_dropped,
                report.first_date,
                report.last_date
            );
            w.finish(json!({"data": data.display().to_string()}))?;
        }
    }
    Ok(())
}

fn forecast(cli: &Cli, file: &FileConfig, a: &crate::ForecastArgs) -> Result<(), CliError> {
    let c = Common::resolve(cli, file)?;
    let data = file
        .pick(a.data.clone(), "data")?
        .ok_or_else(|| CliError::Usage("missing required --data".to_string()))?;
    let target_name = file
        .pick(a.target.clone(), "target")?
        .ok_or_else(|| CliError::Usage("missing required --target".to_string()))?;
    let cfg = RollingConfig {
        window: file.pick_or(a.window, "window", 130)?,
        horizon: file.pick_or(a.h, "h", 24)?,
        y_lag_max: file.pick_or(a.y_lag_max, "y-lag-max", 12)?,
        p_max: c.p_max,
        q_max: c.q_max,
        penalize_y_lags: !file.flag(a.unpenalized_lags, "unpenalized-lags")?,
        ..RollingConfig::default()
    };
    if cfg.horizon == 0 || cfg.window == 0 {
        return Err(CliError::Usage("--h and --window must be positive".to_string()));
    }
    let raw = read_raw(&data)?;
    let k = raw
        .names
        .iter()
        .position(|n| *n == target_name)
        .ok_or_else(|| CliError::Data(format!("no column named {target_name:?}")))?;
    let others: Vec<usize> = (0..raw.names.len()).filter(|&j| j != k).collect();
    if others.is_empty() {
        return Err(CliError::Data("no predictors besides the target".to_string()));
    }
    let (panel, first_x) = transform(&raw, &others)?;
    let cpi = Series::new(raw.columns[k].clone())?;
    let ts = target_transform(&cpi, cfg.horizon)
        .map_err(|e| CliError::Data(format!("target column {target_name}: {e}")))?;
    // common rows of target, regressand and predictors, indexed by raw row
    let start = first_x.max(ts.target_start).max(ts.regressand_start);
    let end = raw.dates.len();
    if end <= start {
        return Err(CliError::Data("no common sample".to_string()));
    }
    let target = ts.target.slice(start - ts.target_start..end - ts.target_start);
    let y = ts.regressand.slice(start - ts.regressand_start..end - ts.regressand_start);
    let x = panel.slice_rows(start - first_x..end - first_x);
    cfg.origins(y.len()).map_err(|e| CliError::Usage(format!("infeasible window: {e}")))?;

    let methods = [ForecastMethod::Ar, ForecastMethod::Lasso, ForecastMethod::ULasso];
    let results = methods
        .iter()
        .map(|&m| rolling_forecast_target(&target, &y, &x, m, &cfg))
        .collect::<Result<Vec<ForecastResult>, _>>()?;

    let date = |row: usize| raw.dates[start + row].to_string();
    let mut csv = String::from("date,origin_date,actual,AR,LASSO,uLASSO\n");
    for i in 0..results[0].origins.len() {
        let o = results[0].origins[i];
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            date(o + cfg.horizon),
            date(o),
            results[0].actuals[i],
            results[0].predictions[i],
            results[1].predictions[i],
            results[2].predictions[i]
        ));
    }
    let rm: Vec<f64> = results.iter().map(rmsfe).collect::<Result<_, _>>()?;
    // second method less accurate: pass its errors first
    let pair = |first: usize, second: usize| -> Result<serde_json::Value, CliError> {
        let dm = dm_test(&results[second].errors(), &results[first].errors(), cfg.horizon)?;
        Ok(json!({
            "method1": methods[first].name(),
            "method2": methods[second].name(),
            "rmsfe_ratio": rm[first] / rm[second],
            "dm_statistic": dm.statistic,
            "dm_p_value": dm.p_value_one_sided,
        }))
    };
    let sel = selection_stats(&results[1], &results[2]);
    let summary = json!({
        "target": target_name,
        "horizon": cfg.horizon,
        "window": cfg.window,
        "origins": results[0].origins.len(),
        "first_target_date": date(results[0].origins[0] + cfg.horizon),
        "last_target_date": date(*results[0].origins.last().expect("nonempty") + cfg.horizon),
        "rmsfe": {"AR": rm[0], "LASSO": rm[1], "uLASSO": rm[2]},
        "comparisons": [pair(2, 1)?, pair(2, 0)?, pair(1, 0)?],
        "selection": sel,
    });
    let mut w = RunWriter::new(&c.out, "forecast")?;
    w.write("forecasts.csv", &csv)?;
    w.write("summary.json", &serde_json::to_string_pretty(&summary).expect("summary serializes"))?;
    println!(
        "RMSFE AR {:.4}, LASSO {:.4}, uLASSO {:.4}; uLASSO/LASSO {:.3}",
        rm[0],
        rm[1],
        rm[2],
        rm[2] / rm[1]
    );
    w.finish(with_common(
        json!({
            "data": data.display().to_string(),
            "target": target_name,
            "h": cfg.horizon,
            "window": cfg.window,
            "y_lag_max": cfg.y_lag_max,
            "penalize_y_lags": cfg.penalize_y_lags,
        }),
        &c,
    ))?;
    Ok(())
}
