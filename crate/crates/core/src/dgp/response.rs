use serde::{Deserialize, Serialize};

use super::arma::{simulate_series, ArmaProcess, DEFAULT_BURN_IN};
use super::rng::{ReplicationSeed, RESPONSE_LANE};
use crate::error::{Error, Result};
use crate::statcore::{Series, SeriesPanel};

/// `y_t = sum_i alpha_i x_{i,t-lag} + eps_t`, where `eps` follows
/// `error_arma` driven by `N(0, noise_sd^2)` innovations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseDgpSpec {
    pub alpha: Vec<f64>,
    pub lag: usize,
    pub error_arma: ArmaProcess,
    pub noise_sd: f64,
}

impl ResponseDgpSpec {
    /// Indices of the nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        self.alpha
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Response aligned with the covariates that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseSample {
    /// `y_t` for input rows `lag..`.
    pub y: Series,
    /// Input panel restricted to the same rows as `y`. The regressors at
    /// `t - lag` sit `lag` rows earlier.
    pub x: SeriesPanel,
}

/// Generates the response from an input panel with `T + lag` rows; the
/// first `lag` rows only serve as lagged regressors and are dropped.
pub fn gen_response(
    spec: &ResponseDgpSpec,
    panel: &SeriesPanel,
    seed: &ReplicationSeed,
) -> Result<ResponseSample> {
    if spec.alpha.len() > panel.n_cols() {
        return Err(Error::LengthMismatch { left: panel.n_cols(), right: spec.alpha.len() });
    }
    let rows = panel.n_rows();
    if spec.lag >= rows {
        return Err(Error::Domain(format!("lag {} must be below T = {rows}", spec.lag)));
    }
    if !(spec.noise_sd >= 0.0) {
        return Err(Error::InvalidInput("noise_sd must be non-negative".to_string()));
    }
    let t = rows - spec.lag;
    let eps = if spec.noise_sd == 0.0 {
        vec![0.0; t]
    } else {
        simulate_series(&spec.error_arma, spec.noise_sd, t, DEFAULT_BURN_IN, seed, RESPONSE_LANE)?
    };
    let mut y = eps;
    for (i, &a) in spec.alpha.iter().enumerate() {
        if a != 0.0 {
            let x = panel.column(i);
            for (k, yk) in y.iter_mut().enumerate() {
                *yk += a * x[k];
            }
        }
    }
    Ok(ResponseSample {
        y: Series::new(y)?,
        x: panel.slice_rows(spec.lag..rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_lagged_copy() {
        let panel = SeriesPanel::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        let spec = ResponseDgpSpec {
            alpha: vec![1.0],
            lag: 1,
            error_arma: ArmaProcess::white(),
            noise_sd: 0.0,
        };
        let r = gen_response(&spec, &panel, &ReplicationSeed::new(1, 0)).unwrap();
        assert_eq!(r.y.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(r.x.column(0).values(), &[2.0, 3.0, 4.0]);
    }

    #[test]
    fn lag_must_fit() {
        let panel = SeriesPanel::from_columns(vec![vec![1.0, 2.0]]).unwrap();
        let spec = ResponseDgpSpec {
            alpha: vec![1.0],
            lag: 2,
            error_arma: ArmaProcess::white(),
            noise_sd: 1.0,
        };
        assert!(gen_response(&spec, &panel, &ReplicationSeed::new(1, 0)).is_err());
    }
}
