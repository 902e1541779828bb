use serde::{Deserialize, Serialize};

use super::innovations::{gen_innovations, InnovationSpec};
use super::rng::ReplicationSeed;
use crate::error::{Error, Result};
use crate::statcore::{companion_spectral_radius, Series, SeriesPanel};

/// `x_t = sum_l ar[l-1] x_{t-l} + u_t + sum_k ma[k-1] u_{t-k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaProcess {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
}

const STATIONARY_RADIUS: f64 = 1.0 - 1e-8;

/// Default number of discarded start-up observations for recursions that
/// are not initialized from their stationary law.
pub const DEFAULT_BURN_IN: usize = 1000;

impl ArmaProcess {
    pub fn white() -> Self {
        ArmaProcess { ar: vec![], ma: vec![] }
    }

    pub fn ar1(phi: f64) -> Self {
        ArmaProcess { ar: vec![phi], ma: vec![] }
    }

    pub fn new(ar: Vec<f64>, ma: Vec<f64>) -> Self {
        ArmaProcess { ar, ma }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ar.iter().chain(&self.ma).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite ARMA coefficient".to_string()));
        }
        let radius = companion_spectral_radius(&self.ar);
        if radius >= STATIONARY_RADIUS {
            return Err(Error::Nonstationary { radius });
        }
        Ok(())
    }

    /// AR(1) without MA part (white noise included).
    fn ar1_coefficient(&self) -> Option<f64> {
        match (self.ar.as_slice(), self.ma.is_empty()) {
            ([], true) => Some(0.0),
            ([phi], true) => Some(*phi),
            _ => None,
        }
    }

    /// Runs the recursion on `u` from zero initial values.
    fn filter(&self, u: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; u.len()];
        for t in 0..u.len() {
            let mut v = u[t];
            for (l, a) in self.ar.iter().enumerate() {
                if t > l {
                    v += a * x[t - l - 1];
                }
            }
            for (k, m) in self.ma.iter().enumerate() {
                if t > k {
                    v += m * u[t - k - 1];
                }
            }
            x[t] = v;
        }
        x
    }
}

/// One [`ArmaProcess`] per covariate column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaDgpSpec {
    pub columns: Vec<ArmaProcess>,
}

impl ArmaDgpSpec {
    pub fn new(columns: Vec<ArmaProcess>) -> Self {
        ArmaDgpSpec { columns }
    }

    /// `n` AR(1) columns sharing the coefficient `phi`.
    pub fn ar1_panel(n: usize, phi: f64) -> Self {
        ArmaDgpSpec { columns: vec![ArmaProcess::ar1(phi); n] }
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.columns.iter().enumerate() {
            c.validate().map_err(|e| Error::Column {
                column: i,
                name: format!("x{}", i + 1),
                source: Box::new(e),
            })?;
        }
        Ok(())
    }
}

/// Filters each innovation column through its ARMA recursion from zero
/// initial values and drops the first `burn_in` rows.
pub fn gen_arma_panel(
    dgp: &ArmaDgpSpec,
    innovations: &SeriesPanel,
    burn_in: usize,
) -> Result<SeriesPanel> {
    dgp.validate()?;
    if innovations.n_cols() != dgp.n() {
        return Err(Error::LengthMismatch { left: dgp.n(), right: innovations.n_cols() });
    }
    if innovations.n_rows() <= burn_in {
        return Err(Error::TooShort { needed: burn_in + 1, got: innovations.n_rows() });
    }
    let columns = dgp
        .columns
        .iter()
        .zip(innovations.columns())
        .map(|(p, u)| Series::new(p.filter(u)[burn_in..].to_vec()))
        .collect::<Result<Vec<_>>>()?;
    SeriesPanel::new(columns, x_names(dgp.n()))
}

fn x_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// AR(1) columns started from the stationary law: `x_0 = u_0 / sqrt(1-phi^2)`.
pub fn stationary_ar1(phis: &[f64], innovations: &SeriesPanel) -> Result<SeriesPanel> {
    let columns = phis
        .iter()
        .zip(innovations.columns())
        .map(|(&phi, u)| {
            let mut x = Vec::with_capacity(u.len());
            let mut prev = u[0] / (1.0 - phi * phi).sqrt();
            x.push(prev);
            for &ut in &u[1..] {
                prev = phi * prev + ut;
                x.push(prev);
            }
            Series::new(x)
        })
        .collect::<Result<Vec<_>>>()?;
    SeriesPanel::new(columns, x_names(phis.len()))
}

/// Simulates `t` observations of the covariate panel for one replication,
/// with innovation column `i` on lane `i`.
///
/// Panels made of AR(1) (or white) columns are started exactly from their
/// stationary law when that law is the one implied by independent starts,
/// i.e. when innovations are cross-sectionally uncorrelated or all columns
/// share one coefficient. Everything else uses `burn_in` discarded rows.
pub fn simulate_panel(
    dgp: &ArmaDgpSpec,
    innov: &InnovationSpec,
    t: usize,
    burn_in: usize,
    seed: &ReplicationSeed,
) -> Result<SeriesPanel> {
    dgp.validate()?;
    let phis: Option<Vec<f64>> = dgp.columns.iter().map(|c| c.ar1_coefficient()).collect();
    let exact = match &phis {
        Some(p) => innov.cross_corr.is_none() || p.windows(2).all(|w| w[0] == w[1]),
        None => false,
    };
    if exact {
        let u = gen_innovations(innov, t, dgp.n(), seed, 0)?;
        stationary_ar1(phis.as_deref().unwrap(), &u)
    } else {
        let u = gen_innovations(innov, t + burn_in, dgp.n(), seed, 0)?;
        gen_arma_panel(dgp, &u, burn_in)
    }
}

/// Simulates a single series driven by i.i.d. `N(0, sd^2)` innovations.
pub(crate) fn simulate_series(
    process: &ArmaProcess,
    sd: f64,
    t: usize,
    burn_in: usize,
    seed: &ReplicationSeed,
    lane: u64,
) -> Result<Vec<f64>> {
    process.validate()?;
    let spec = InnovationSpec {
        scale: Some(vec![sd]),
        ..InnovationSpec::gaussian()
    };
    let dgp = ArmaDgpSpec::new(vec![process.clone()]);
    if let Some(phi) = process.ar1_coefficient() {
        let u = gen_innovations(&spec, t, 1, seed, lane)?;
        Ok(stationary_ar1(&[phi], &u)?.into_columns().remove(0).into_inner())
    } else {
        let u = gen_innovations(&spec, t + burn_in, 1, seed, lane)?;
        Ok(gen_arma_panel(&dgp, &u, burn_in)?.into_columns().remove(0).into_inner())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_are_identity() {
        let u = SeriesPanel::from_columns(vec![vec![0.3, -1.0, 2.0, 0.5]]).unwrap();
        let x = gen_arma_panel(&ArmaDgpSpec::new(vec![ArmaProcess::white()]), &u, 0).unwrap();
        assert_eq!(x.column(0).values(), u.column(0).values());
    }

    #[test]
    fn explosive_rejected() {
        let dgp = ArmaDgpSpec::new(vec![ArmaProcess::new(vec![0.6, 0.5], vec![])]);
        let u = SeriesPanel::from_columns(vec![vec![0.0; 5]]).unwrap();
        assert!(gen_arma_panel(&dgp, &u, 0).is_err());
    }

    #[test]
    fn recursion_by_hand() {
        let p = ArmaProcess::new(vec![0.5], vec![0.8]);
        let x = p.filter(&[1.0, 0.0, 2.0]);
        assert_eq!(x, vec![1.0, 0.5 + 0.8, 0.5 * 1.3 + 2.0]);
    }
}
