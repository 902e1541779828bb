use proptest::prelude::*;
use sercorr::estimators::soft_threshold;
use sercorr::forecast::{apply_tcode, dm_test, Tcode};
use sercorr::statcore::{
    correlation_matrix, max_offdiag_abs, min_eigenvalue, ols, sample_correlation, Series,
    SeriesPanel,
};

fn varied(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, len).prop_filter("needs spread", |v| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() > 1e-3
    })
}

fn pair(len: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    len.prop_flat_map(|n| (varied(n..n + 1), varied(n..n + 1)))
}

proptest! {
    #[test]
    fn correlation_bounded_and_symmetric((x, y) in pair(5..40)) {
        let (sx, sy) = (Series::new(x).unwrap(), Series::new(y).unwrap());
        let c = sample_correlation(&sx, &sy).unwrap();
        prop_assert!(c.abs() <= 1.0 + 1e-12);
        prop_assert!((c - sample_correlation(&sy, &sx).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn correlation_affine_invariant((x, y) in pair(5..40), a in 0.1f64..10.0, b in -5.0f64..5.0) {
        let (sx, sy) = (Series::new(x.clone()).unwrap(), Series::new(y.clone()).unwrap());
        let c = sample_correlation(&sx, &sy).unwrap();
        let tx = Series::new(x.iter().map(|v| a * v + b).collect()).unwrap();
        let ny = Series::new(y.iter().map(|v| -v).collect()).unwrap();
        prop_assert!((sample_correlation(&tx, &sy).unwrap() - c).abs() < 1e-9);
        prop_assert!((sample_correlation(&sx, &ny).unwrap() + c).abs() < 1e-9);
    }

    #[test]
    fn two_series_eigen_is_one_minus_abs_corr((x, y) in pair(5..40)) {
        let (sx, sy) = (Series::new(x).unwrap(), Series::new(y).unwrap());
        let c = sample_correlation(&sx, &sy).unwrap();
        let m = correlation_matrix(&SeriesPanel::from_columns(vec![
            sx.values().to_vec(),
            sy.values().to_vec(),
        ]).unwrap()).unwrap();
        prop_assert!((min_eigenvalue(&m, None).unwrap() - (1.0 - c.abs())).abs() < 1e-9);
        prop_assert!((max_offdiag_abs(&m).unwrap() - c.abs()).abs() < 1e-12);
        prop_assert!((m.trace() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ols_residuals_orthogonal((x, y) in pair(6..40)) {
        let sy = Series::new(y).unwrap();
        let panel = SeriesPanel::from_columns(vec![x.clone()]).unwrap();
        let fit = ols(&sy, &panel, true).unwrap();
        let r = fit.residuals.values();
        let scale = 1.0 + r.iter().map(|v| v.abs()).sum::<f64>();
        prop_assert!(r.iter().sum::<f64>().abs() < 1e-9 * scale);
        let cross: f64 = r.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!(cross.abs() < 1e-8 * scale * 50.0);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&fit.r_squared));
    }

    #[test]
    fn soft_threshold_shrinks(z in -100.0f64..100.0, l in 0.0f64..50.0) {
        let s = soft_threshold(z, l);
        prop_assert!(s.abs() <= z.abs());
        prop_assert!(s == 0.0 || s.signum() == z.signum());
        prop_assert!((soft_threshold(-z, l) + s).abs() < 1e-15);
        if z.abs() > l {
            prop_assert!((z - s).abs() - l < 1e-12);
        }
    }

    #[test]
    fn dm_is_antisymmetric(
        e1 in prop::collection::vec(-3.0f64..3.0, 30),
        e2 in prop::collection::vec(-3.0f64..3.0, 30),
        h in 1usize..6,
    ) {
        let a = dm_test(&e1, &e2, h).unwrap();
        let b = dm_test(&e2, &e1, h).unwrap();
        prop_assert!((a.mean_differential + b.mean_differential).abs() < 1e-12);
        if a.statistic.is_finite() {
            prop_assert!((a.statistic + b.statistic).abs() < 1e-9);
            prop_assert!((a.p_value_one_sided + b.p_value_one_sided - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn differencing_inverts_cumulation(v in prop::collection::vec(-10.0f64..10.0, 3..30), x0 in -5.0f64..5.0) {
        let mut level = vec![x0];
        for d in &v {
            level.push(level.last().unwrap() + d);
        }
        let diff = apply_tcode(&Series::new(level).unwrap(), Tcode::new(2).unwrap()).unwrap();
        for (a, b) in diff.values().iter().zip(&v) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn log_difference_inverts_growth(g in prop::collection::vec(-0.2f64..0.2, 3..30)) {
        let mut level = vec![100.0f64];
        for r in &g {
            level.push(level.last().unwrap() * r.exp());
        }
        let s = Series::new(level).unwrap();
        let dl = apply_tcode(&s, Tcode::new(5).unwrap()).unwrap();
        prop_assert_eq!(dl.len(), g.len());
        for (a, b) in dl.values().iter().zip(&g) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let d2 = apply_tcode(&s, Tcode::new(6).unwrap()).unwrap();
        for (k, a) in d2.values().iter().enumerate() {
            prop_assert!((a - (g[k + 1] - g[k])).abs() < 1e-12);
        }
    }
}

#[test]
fn tcode_range() {
    assert!(Tcode::new(0).is_err());
    assert!(Tcode::new(8).is_err());
    let lost: Vec<usize> = (1..=7).map(|c| Tcode::new(c).unwrap().rows_lost()).collect();
    assert_eq!(lost, [0, 1, 2, 0, 1, 2, 2]);
}
