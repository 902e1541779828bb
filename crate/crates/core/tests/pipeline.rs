use sercorr::armafilter::{fit_ar, select_order};
use sercorr::dgp::{scenario_design, simulate_panel, ArmaDgpSpec, InnovationSpec, ReplicationSeed};
use sercorr::estimators::{cochrane_orcutt, CoOptions};
use sercorr::forecast::{rmsfe, rolling_forecast, target_transform, ForecastMethod, RollingConfig};
use sercorr::statcore::{Series, SeriesPanel};

fn ar1(phi: f64, t: usize, seed: u64) -> Series {
    let dgp = ArmaDgpSpec::ar1_panel(1, phi);
    let p = simulate_panel(&dgp, &InnovationSpec::gaussian(), t, 200, &ReplicationSeed::new(seed, 0)).unwrap();
    p.column(0).clone()
}

#[test]
fn simulation_is_reproducible_per_replication() {
    let dgp = ArmaDgpSpec::ar1_panel(3, 0.6);
    let sim = |r| simulate_panel(&dgp, &InnovationSpec::gaussian(), 50, 100, &ReplicationSeed::new(9, r)).unwrap();
    assert_eq!(sim(4), sim(4));
    assert_ne!(sim(4).column(0).values(), sim(5).column(0).values());
}

#[test]
fn ar_fit_recovers_coefficient() {
    let s = ar1(0.7, 5000, 11);
    let f = fit_ar(&s, 1).unwrap();
    assert!((f.ar[0] - 0.7).abs() < 0.03, "{:?}", f.ar);
    assert!((f.sigma2 - 1.0).abs() < 0.06);
    let sel = select_order(&s, 3, 2).unwrap();
    assert!(sel.order.p + sel.order.q >= 1);
}

#[test]
fn cochrane_orcutt_recovers_error_autocorrelation() {
    let x = ar1(0.5, 4000, 21);
    let e = ar1(0.6, 4000, 22);
    let y: Vec<f64> = x.iter().zip(e.iter()).map(|(a, b)| 1.0 + 2.0 * a + b).collect();
    let panel = SeriesPanel::from_columns(vec![x.values().to_vec()]).unwrap();
    let co = cochrane_orcutt(&Series::new(y).unwrap(), &panel, &CoOptions::default()).unwrap();
    assert!(co.converged);
    assert!((co.rho - 0.6).abs() < 0.04, "{}", co.rho);
    assert!((co.fit.coefficients[0] - 2.0).abs() < 0.05);
}

#[test]
fn scenario_designs_are_validated() {
    for s in 1..=3 {
        let d = scenario_design(s).unwrap();
        let sample = d.simulate(120, 200, &ReplicationSeed::new(3, 0)).unwrap();
        assert_eq!(sample.y.len(), 120);
        assert_eq!(sample.x.n_rows(), 120);
    }
    assert!(scenario_design(0).is_err());
}

#[test]
fn inflation_target_by_hand() {
    let cpi = [100.0, 101.0, 101.5, 103.0, 103.2, 104.0];
    let ts = target_transform(&Series::new(cpi.to_vec()).unwrap(), 2).unwrap();
    let l: Vec<f64> = cpi.iter().map(|v: &f64| v.ln()).collect();
    // row s = 3: annualized two-month change minus last monthly change at s-2
    let want = 600.0 * (l[3] - l[1]) - 1200.0 * (l[1] - l[0]);
    assert_eq!(ts.target_start, 3);
    assert!((ts.target[0] - want).abs() < 1e-10);
    let want_y = 1200.0 * (l[4] - 2.0 * l[3] + l[2]);
    assert!((ts.regressand[4 - ts.regressand_start] - want_y).abs() < 1e-10);
}

#[test]
fn ar_forecast_beats_unconditional_mean_on_persistent_target() {
    let y = ar1(0.9, 260, 31);
    let x = SeriesPanel::from_columns(vec![ar1(0.5, 260, 32).values().to_vec()]).unwrap();
    let cfg = RollingConfig { window: 120, horizon: 1, y_lag_max: 2, p_max: 1, q_max: 0, ..RollingConfig::default() };
    let r = rolling_forecast(&y, &x, ForecastMethod::Ar, &cfg).unwrap();
    assert_eq!(r.origins.len(), 260 - 120 - 1 + 1);
    let mean_err: f64 = (r.actuals.iter().map(|a| a * a).sum::<f64>() / r.actuals.len() as f64).sqrt();
    let e = rmsfe(&r).unwrap();
    assert!(e < 0.8 * mean_err, "{e} vs {mean_err}");
    assert!(r.y_lags.iter().all(|&p| p >= 1));
}
