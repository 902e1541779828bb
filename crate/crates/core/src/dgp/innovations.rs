use rand::Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use super::rng::ReplicationSeed;
use crate::error::{Error, Result};
use crate::statcore::{cholesky_lower, Series, SeriesPanel, SymMatrix};

/// Marginal law of the i.i.d. draws feeding one column. Draws are rescaled to
/// mean 0 and variance 1 whenever the variance exists; Cauchy and Student-t
/// with `df <= 2` are left on their natural scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InnovationFamily {
    Gaussian,
    Laplace,
    Cauchy,
    StudentT { df: f64 },
    Uniform { a: f64, b: f64 },
    /// One family per column.
    Mixed(Vec<InnovationFamily>),
}

/// Cross-sectional law of the innovation vector `u_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnovationSpec {
    pub family: InnovationFamily,
    /// Population correlation matrix; `None` means identity.
    pub cross_corr: Option<SymMatrix>,
    /// Per-column scale applied last; `None` means unit scale.
    pub scale: Option<Vec<f64>>,
}

impl InnovationSpec {
    pub fn gaussian() -> Self {
        Self::iid(InnovationFamily::Gaussian)
    }

    pub fn iid(family: InnovationFamily) -> Self {
        InnovationSpec { family, cross_corr: None, scale: None }
    }

    pub fn with_cross_corr(mut self, c: SymMatrix) -> Self {
        self.cross_corr = Some(c);
        self
    }

    /// Toeplitz correlation `rho^{|i-j|}` of order `n`.
    pub fn toeplitz(n: usize, rho: f64) -> SymMatrix {
        SymMatrix::from_fn(n, |i, j| rho.powi((j - i) as i32))
    }

    /// Equicorrelation `rho` off the diagonal.
    pub fn equicorrelated(n: usize, rho: f64) -> SymMatrix {
        SymMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { rho })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.family.validate(n)?;
        if let Some(c) = &self.cross_corr {
            if c.order() != n {
                return Err(Error::LengthMismatch { left: n, right: c.order() });
            }
            for i in 0..n {
                if (c.get(i, i) - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidInput(
                        "cross-correlation matrix must have unit diagonal".to_string(),
                    ));
                }
            }
            cholesky_lower(c)?;
        }
        if let Some(s) = &self.scale {
            if s.len() != n {
                return Err(Error::LengthMismatch { left: n, right: s.len() });
            }
            if s.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::InvalidInput("scales must be positive".to_string()));
            }
        }
        Ok(())
    }
}

impl InnovationFamily {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            InnovationFamily::StudentT { df } if !(*df > 0.0) => {
                Err(Error::InvalidInput(format!("Student-t df = {df} must be positive")))
            }
            InnovationFamily::Uniform { a, b } if !(a < b) => {
                Err(Error::InvalidInput(format!("uniform bounds ({a}, {b}) must satisfy a < b")))
            }
            InnovationFamily::Mixed(v) => {
                if v.len() != n {
                    return Err(Error::LengthMismatch { left: n, right: v.len() });
                }
                for f in v {
                    if matches!(f, InnovationFamily::Mixed(_)) {
                        return Err(Error::InvalidInput("nested mixed families".to_string()));
                    }
                    f.validate(1)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn for_column(&self, i: usize) -> &InnovationFamily {
        match self {
            InnovationFamily::Mixed(v) => &v[i],
            f => f,
        }
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            InnovationFamily::Gaussian => StandardNormal.sample(rng),
            InnovationFamily::Laplace => {
                // inverse CDF with b = 1/sqrt(2) for unit variance
                let mut u: f64 = rng.random::<f64>() - 0.5;
                while u == -0.5 {
                    u = rng.random::<f64>() - 0.5;
                }
                -std::f64::consts::FRAC_1_SQRT_2 * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
            InnovationFamily::Cauchy => Cauchy::new(0.0, 1.0).unwrap().sample(rng),
            InnovationFamily::StudentT { df } => {
                let x: f64 = StudentT::new(*df).unwrap().sample(rng);
                if *df > 2.0 {
                    x * ((df - 2.0) / df).sqrt()
                } else {
                    x
                }
            }
            InnovationFamily::Uniform { a, b } => {
                let x = rng.random_range(*a..*b);
                (x - 0.5 * (a + b)) / ((b - a) / 12f64.sqrt())
            }
            InnovationFamily::Mixed(_) => unreachable!("resolved per column"),
        }
    }
}

/// Draws a `t x n` innovation panel. Column `i` is drawn from lane
/// `lane0 + i` of `seed`; cross-sectional correlation is induced by the
/// lower Cholesky factor of `cross_corr`.
pub fn gen_innovations(
    spec: &InnovationSpec,
    t: usize,
    n: usize,
    seed: &ReplicationSeed,
    lane0: u64,
) -> Result<SeriesPanel> {
    spec.validate(n)?;
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut rng = seed.rng(lane0 + i as u64);
            let fam = spec.family.for_column(i);
            (0..t).map(|_| fam.draw(&mut rng)).collect()
        })
        .collect();
    if let Some(c) = &spec.cross_corr {
        let l = cholesky_lower(c)?;
        let mut mixed = vec![vec![0.0; t]; n];
        for r in 0..t {
            for i in 0..n {
                let mut v = 0.0;
                for j in 0..=i {
                    v += l[(i, j)] * cols[j][r];
                }
                mixed[i][r] = v;
            }
        }
        cols = mixed;
    }
    if let Some(s) = &spec.scale {
        for (c, k) in cols.iter_mut().zip(s) {
            c.iter_mut().for_each(|v| *v *= k);
        }
    }
    let columns = cols
        .into_iter()
        .map(Series::new)
        .collect::<Result<Vec<_>>>()?;
    let names = (1..=n).map(|i| format!("u{i}")).collect();
    SeriesPanel::new(columns, names)
}
