//! The simulation designs used by the experiments.

use serde::{Deserialize, Serialize};

use super::arma::{simulate_panel, ArmaDgpSpec, ArmaProcess};
use super::innovations::{InnovationFamily, InnovationSpec};
use super::response::{gen_response, ResponseDgpSpec, ResponseSample};
use super::rng::ReplicationSeed;
use crate::error::{Error, Result};

/// Covariates, their innovations and the response equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionDesign {
    pub covariates: ArmaDgpSpec,
    pub innovations: InnovationSpec,
    pub response: ResponseDgpSpec,
}

impl RegressionDesign {
    /// Draws `t` observations of `(y, x)` for one replication.
    pub fn simulate(&self, t: usize, burn_in: usize, seed: &ReplicationSeed) -> Result<ResponseSample> {
        let panel = simulate_panel(
            &self.covariates,
            &self.innovations,
            t + self.response.lag,
            burn_in,
            seed,
        )?;
        gen_response(&self.response, &panel, seed)
    }
}

/// Two-covariate designs with `y_t = x_{1,t-1} + x_{2,t-1} + eps_t`:
///
/// 1. `x_i` AR(1) with 0.7, `eps` AR(1) with 0.7 (common factor regime);
/// 2. `x_1` AR(1) 0.75, `x_2` AR(1) 0.6, `eps` AR(1) 0.9;
/// 3. `x_1` ARMA(1,1) with (0.6, 0.5), `x_2` AR(1) 0.75, `eps` AR(2) (0.6, 0.3).
///
/// All innovations are independent standard normal.
pub fn scenario_design(scenario: u8) -> Result<RegressionDesign> {
    let (x1, x2, eps) = match scenario {
        1 => (ArmaProcess::ar1(0.7), ArmaProcess::ar1(0.7), ArmaProcess::ar1(0.7)),
        2 => (ArmaProcess::ar1(0.75), ArmaProcess::ar1(0.6), ArmaProcess::ar1(0.9)),
        3 => (
            ArmaProcess::new(vec![0.6], vec![0.5]),
            ArmaProcess::ar1(0.75),
            ArmaProcess::new(vec![0.6, 0.3], vec![]),
        ),
        other => {
            return Err(Error::InvalidInput(format!("unknown scenario {other} (expected 1, 2 or 3)")))
        }
    };
    Ok(RegressionDesign {
        covariates: ArmaDgpSpec::new(vec![x1, x2]),
        innovations: InnovationSpec::gaussian(),
        response: ResponseDgpSpec {
            alpha: vec![1.0, 1.0],
            lag: 1,
            error_arma: eps,
            noise_sd: 1.0,
        },
    })
}

/// Sparse high-dimensional design: `n` AR(1) covariates with coefficient
/// `phi` and innovation correlation `0.3^{|i-j|}`; the first `s` have unit
/// coefficients on `x_{t-1}`; the error is AR(1) with the same `phi` and
/// unit innovation variance.
pub fn sparse_design(n: usize, phi: f64, s: usize) -> Result<RegressionDesign> {
    if s > n {
        return Err(Error::InvalidInput(format!("sparsity {s} exceeds n = {n}")));
    }
    let mut alpha = vec![0.0; n];
    alpha[..s].iter_mut().for_each(|a| *a = 1.0);
    Ok(RegressionDesign {
        covariates: ArmaDgpSpec::ar1_panel(n, phi),
        innovations: InnovationSpec::gaussian().with_cross_corr(InnovationSpec::toeplitz(n, 0.3)),
        response: ResponseDgpSpec {
            alpha,
            lag: 1,
            error_arma: ArmaProcess::ar1(phi),
            noise_sd: 1.0,
        },
    })
}

/// Non-Gaussian, weakly correlated pair: `x_1` AR(3) with coefficients
/// `(phi+0.1, phi+0.1, -0.2)`, `x_2` ARMA(2,1) with `(phi, phi)` and MA 0.8,
/// bivariate Laplace innovations with correlation 0.2.
pub fn laplace_arma_pair(phi: f64) -> (ArmaDgpSpec, InnovationSpec) {
    (
        ArmaDgpSpec::new(vec![
            ArmaProcess::new(vec![phi + 0.1, phi + 0.1, -0.2], vec![]),
            ArmaProcess::new(vec![phi, phi], vec![0.8]),
        ]),
        InnovationSpec::iid(InnovationFamily::Laplace)
            .with_cross_corr(InnovationSpec::equicorrelated(2, 0.2)),
    )
}

/// Gaussian ARMA pair: `x_1` ARMA(3,1) with AR `(phi, phi, -phi)` and MA 0.5,
/// `x_2` ARMA(2,2) with AR `(phi, phi)` and MA `(0.7, -0.4)`.
pub fn gaussian_arma_pair(phi: f64) -> (ArmaDgpSpec, InnovationSpec) {
    (
        ArmaDgpSpec::new(vec![
            ArmaProcess::new(vec![phi, phi, -phi], vec![0.5]),
            ArmaProcess::new(vec![phi, phi], vec![0.7, -0.4]),
        ]),
        InnovationSpec::gaussian(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn designs_are_stationary() {
        for k in 1..=3 {
            scenario_design(k).unwrap().covariates.validate().unwrap();
        }
        assert!(scenario_design(4).is_err());
        for phi in [0.15, 0.3, 0.45, 0.475] {
            laplace_arma_pair(phi).0.validate().unwrap();
        }
        for phi in [0.1, 0.2, 0.3, 0.33] {
            gaussian_arma_pair(phi).0.validate().unwrap();
        }
        let d = sparse_design(50, 0.9, 10).unwrap();
        assert_eq!(d.response.support(), (0..10).collect::<Vec<_>>());
    }
}
