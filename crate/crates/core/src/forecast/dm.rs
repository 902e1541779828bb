use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Diebold-Mariano comparison of squared-error losses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmResult {
    pub statistic: f64,
    /// `P(Z >= statistic)`: small when the first method's loss is larger.
    pub p_value_one_sided: f64,
    pub mean_differential: f64,
}

/// `d_t = e1_t^2 - e2_t^2`, statistic `mean(d) / sqrt(LRV / n)` with a
/// Bartlett long-run variance over `h - 1` lags (weights `1 - j/h`).
///
/// The alternative is that the method behind `errors1` is less accurate.
/// A zero long-run variance gives statistic 0 and p 0.5 when the mean
/// differential is also zero, and an infinite statistic otherwise.
pub fn dm_test(errors1: &[f64], errors2: &[f64], h: usize) -> Result<DmResult> {
    if errors1.len() != errors2.len() {
        return Err(Error::LengthMismatch { left: errors1.len(), right: errors2.len() });
    }
    let n = errors1.len();
    if n < 10 {
        return Err(Error::TooShort { needed: 10, got: n });
    }
    if h == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".to_string()));
    }
    if errors1.iter().chain(errors2).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: 0 });
    }
    let d: Vec<f64> = errors1.iter().zip(errors2).map(|(a, b)| a * a - b * b).collect();
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let gamma = |j: usize| -> f64 { (j..n).map(|t| (d[t] - mean) * (d[t - j] - mean)).sum::<f64>() / nf };
    let mut lrv = gamma(0);
    for j in 1..h.min(n) {
        lrv += 2.0 * (1.0 - j as f64 / h as f64) * gamma(j);
    }
    // rounding can leave a tiny residue for a constant differential
    let scale = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let statistic = if lrv <= 1e-24 * scale * scale {
        if mean == 0.0 {
            0.0
        } else {
            mean.signum() * f64::INFINITY
        }
    } else {
        mean / (lrv / nf).sqrt()
    };
    let p = if statistic == 0.0 { 0.5 } else { 1.0 - Normal::standard().cdf(statistic) };
    Ok(DmResult { statistic, p_value_one_sided: p, mean_differential: mean })
}
