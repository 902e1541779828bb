//! Closed-form finite-sample results for pairs of independent Gaussian AR(1)
//! series: the density of their sample correlation, its tail probability,
//! the sampling laws of the regression slope `b` and of `v = sum x_1^2`,
//! and the oracle error bound of a penalized estimator.
//!
//! Gamma-function ratios are evaluated in log space so that `T` in the tens
//! of thousands does not overflow.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::statcore::{Series, SeriesPanel};

/// Two independent stationary Gaussian AR(1) series observed for `t` periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar1PairSpec {
    pub phi1: f64,
    pub phi2: f64,
    pub t: usize,
}

impl Ar1PairSpec {
    /// `t >= 4` is accepted: at `t = 4` the null density is uniform.
    pub fn new(phi1: f64, phi2: f64, t: usize) -> Result<Self> {
        for (name, phi) in [("phi1", phi1), ("phi2", phi2)] {
            if !phi.is_finite() || phi.abs() >= 1.0 {
                return Err(Error::Domain(format!("{name} = {phi} must satisfy |phi| < 1")));
            }
        }
        if t < 4 {
            return Err(Error::Domain(format!("T = {t} must be at least 4")));
        }
        Ok(Ar1PairSpec { phi1, phi2, t })
    }

    /// A pair with product `phi12`, split as `phi1 = sqrt|phi12|`,
    /// `phi2 = sign(phi12) sqrt|phi12|`. Only the product enters the density.
    pub fn from_product(phi12: f64, t: usize) -> Result<Self> {
        if !phi12.is_finite() || phi12.abs() >= 1.0 {
            return Err(Error::Domain(format!("phi12 = {phi12} must satisfy |phi12| < 1")));
        }
        let r = phi12.abs().sqrt();
        Self::new(r, r.copysign(phi12), t)
    }

    pub fn phi12(&self) -> f64 {
        self.phi1 * self.phi2
    }
}

/// Density evaluations on a grid of correlation values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub points: Vec<f64>,
    pub densities: Vec<f64>,
}

impl DensityGrid {
    /// Two-column CSV with header `c,density`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,density\n");
        for (c, d) in self.points.iter().zip(&self.densities) {
            out.push_str(&format!("{c},{d}\n"));
        }
        out
    }
}

/// Inputs of the estimation-error bound of a penalized estimator on an
/// `s`-sparse coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub lambda: f64,
    pub gamma: f64,
    pub sparsity_s: usize,
}

fn ln_norm_const(t: usize) -> f64 {
    let t = t as f64;
    ln_gamma((t - 1.0) / 2.0) - ln_gamma((t - 2.0) / 2.0) - 0.5 * PI.ln()
}

fn ln_density(c: f64, t: usize, phi12: f64) -> f64 {
    let tf = t as f64;
    let c2 = c * c;
    let one_m_p2 = 1.0 - phi12 * phi12;
    let q = one_m_p2 + 2.0 * c2 * phi12 * (phi12 - 1.0);
    ln_norm_const(t) + (1.0 - phi12).ln() + 0.5 * (tf - 4.0) * (-c2).ln_1p()
        + 0.5 * (tf - 2.0) * one_m_p2.ln()
        - 0.5 * (tf - 1.0) * q.ln()
}

/// Finite-sample density of the sample correlation of the pair at `c`.
pub fn corr_density(c: f64, spec: &Ar1PairSpec) -> Result<f64> {
    if !c.is_finite() || c.abs() >= 1.0 {
        return Err(Error::Domain(format!("correlation {c} outside (-1, 1)")));
    }
    Ok(ln_density(c.abs(), spec.t, spec.phi12()).exp())
}

/// Density on `n_points` equally spaced points `-1 + 2k/(n_points+1)`,
/// `k = 1..=n_points`.
pub fn density_grid(spec: &Ar1PairSpec, n_points: usize) -> Result<DensityGrid> {
    if n_points < 3 {
        return Err(Error::Domain(format!("n_points = {n_points} must be at least 3")));
    }
    let step = 2.0 / (n_points as f64 + 1.0);
    let points: Vec<f64> = (1..=n_points).map(|k| -1.0 + step * k as f64).collect();
    let densities = points
        .iter()
        .map(|&c| corr_density(c, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityGrid { points, densities })
}

pub const DEFAULT_GRID_POINTS: usize = 5000;

/// `Pr(|c_hat| >= tau)` by adaptive Gauss-Legendre quadrature of the density
/// over `[tau, 1]` (absolute tolerance 1e-8).
pub fn tail_prob(tau: f64, spec: &Ar1PairSpec) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Domain(format!("tau = {tau} outside [0, 1]")));
    }
    if tau >= 1.0 {
        return Ok(0.0);
    }
    let (t, phi12) = (spec.t, spec.phi12());
    let f = |c: f64| if c >= 1.0 { 0.0 } else { ln_density(c, t, phi12).exp() };
    Ok((2.0 * adaptive_gl(&f, tau, 1.0, 1e-8)).clamp(0.0, 1.0))
}

/// Lower bound on `Pr(psi_min <= 1 - tau)` for the 2x2 sample correlation
/// matrix of the pair: the smallest eigenvalue is `1 - |c_hat|`, and with more
/// series any one pair already pulls the minimum below `1 - |c_ij|`.
pub fn eigen_tail_lower_bound(tau: f64, spec: &Ar1PairSpec) -> Result<f64> {
    tail_prob(tau, spec)
}

/// Distribution function of the sample correlation, `Pr(c_hat <= c)`.
pub fn corr_cdf(c: f64, spec: &Ar1PairSpec) -> Result<f64> {
    if c <= -1.0 {
        return Ok(0.0);
    }
    if c >= 1.0 {
        return Ok(1.0);
    }
    let tail = tail_prob(c.abs(), spec)?;
    Ok(if c >= 0.0 { 1.0 - 0.5 * tail } else { 0.5 * tail })
}

/// Approximate sampling variance of the slope `b` from regressing the second
/// series on the first.
pub fn var_b(spec: &Ar1PairSpec) -> f64 {
    let (p1, p2) = (spec.phi1, spec.phi2);
    let p12 = p1 * p2;
    (1.0 - p12 * p12) * (1.0 - p1 * p1)
        / ((spec.t as f64 - 1.0) * (1.0 - p2 * p2) * (1.0 - p12) * (1.0 - p12))
}

/// Shape and scale of the Gamma law of `v = sum_t x_{1t}^2` for a unit
/// innovation variance AR(1) with coefficient `phi2`.
pub fn gamma_params_v(phi2: f64, t: usize) -> Result<(f64, f64)> {
    if !phi2.is_finite() || phi2.abs() >= 1.0 {
        return Err(Error::Domain(format!("phi = {phi2} must satisfy |phi| < 1")));
    }
    if t < 4 {
        return Err(Error::Domain(format!("T = {t} must be at least 4")));
    }
    Ok(((t as f64 - 2.0) / 2.0, 2.0 / (1.0 - phi2 * phi2)))
}

/// Variance of the limiting distribution of the OLS t-statistic for the slope
/// between two independent AR(1) series.
pub fn limiting_tstat_variance(phi1: f64, phi2: f64) -> Result<f64> {
    for phi in [phi1, phi2] {
        if !phi.is_finite() || phi.abs() >= 1.0 {
            return Err(Error::Domain(format!("phi = {phi} must satisfy |phi| < 1")));
        }
    }
    let p12 = phi1 * phi2;
    Ok((1.0 - p12 * p12) / ((1.0 - p12) * (1.0 - p12)))
}

/// `3 lambda sqrt(s) / gamma`, the l2 error bound of a penalized estimator
/// with an l1 penalty on an `s`-sparse target.
pub fn prs_error_bound(b: &BoundInputs) -> Result<f64> {
    if !(b.lambda > 0.0) || !(b.gamma > 0.0) || b.sparsity_s == 0 {
        return Err(Error::Domain(
            "lambda, gamma and s must be strictly positive".to_string(),
        ));
    }
    Ok(3.0 * b.lambda * (b.sparsity_s as f64).sqrt() / b.gamma)
}

/// `2 max_i |sum_t x_it eps_t| / T`, the smallest penalty level for which the
/// error bound holds.
pub fn lambda_lower_bound(x: &SeriesPanel, eps: &Series) -> Result<f64> {
    if x.n_rows() != eps.len() {
        return Err(Error::LengthMismatch {
            left: x.n_rows(),
            right: eps.len(),
        });
    }
    if eps.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let t = eps.len() as f64;
    let best = x
        .columns()
        .iter()
        .map(|c| crate::statcore::dot(c, eps).abs())
        .fold(0.0, f64::max);
    Ok(2.0 * best / t)
}

const GL_ORDER: usize = 10;

fn gl_rule() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut x = [0.0; GL_ORDER];
        let mut w = [0.0; GL_ORDER];
        for i in 0..n {
            // Newton iteration on P_n from the Chebyshev-like initial guess
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, 0.0);
                for j in 0..n {
                    let p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
                }
                dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
                let dz = p0 / dp;
                z -= dz;
                if dz.abs() < 1e-15 {
                    break;
                }
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        (x, w)
    })
}

fn gl(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = gl_rule();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * x.iter().zip(w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>()
}

/// Adaptive composite Gauss-Legendre quadrature by interval halving.
pub(crate) fn adaptive_gl(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (gl(f, a, m), gl(f, m, b));
        if depth == 0 || (l + r - whole).abs() <= tol {
            l + r
        } else {
            rec(f, a, m, l, 0.5 * tol, depth - 1) + rec(f, m, b, r, 0.5 * tol, depth - 1)
        }
    }
    rec(f, a, b, gl(f, a, b), tol, 50)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        // degree 19 integrates exactly with 10 nodes
        let v = gl(&|x: f64| x.powi(18), -1.0, 1.0);
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
        let e = adaptive_gl(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((e - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn uniform_at_t4() {
        let s = Ar1PairSpec::new(0.0, 0.0, 4).unwrap();
        for c in [-0.9, -0.3, 0.0, 0.5, 0.99] {
            assert!((corr_density(c, &s).unwrap() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        let s = Ar1PairSpec::new(0.5, 0.5, 50).unwrap();
        assert!(corr_density(1.0, &s).is_err());
        assert!(tail_prob(-0.1, &s).is_err());
        assert!(Ar1PairSpec::new(1.0, 0.0, 50).is_err());
        assert!(Ar1PairSpec::new(0.0, 0.0, 3).is_err());
        assert_eq!(tail_prob(1.0, &s).unwrap(), 0.0);
    }

    #[test]
    fn grid_placement() {
        let s = Ar1PairSpec::new(0.3, 0.3, 50).unwrap();
        let g = density_grid(&s, 3).unwrap();
        assert_eq!(g.points, vec![-0.5, 0.0, 0.5]);
        assert_eq!(g.densities[0], g.densities[2]);
        assert!(g.to_csv().starts_with("c,density\n-0.5,"));
    }

    #[test]
    fn closed_forms() {
        let s = Ar1PairSpec::new(0.0, 0.0, 101).unwrap();
        assert!((var_b(&s) - 0.01).abs() < 1e-15);
        assert_eq!(gamma_params_v(0.0, 102).unwrap(), (50.0, 2.0));
        assert_eq!(limiting_tstat_variance(0.0, 0.0).unwrap(), 1.0);
        let b = BoundInputs { lambda: 1.0, gamma: 1.0, sparsity_s: 4 };
        assert_eq!(prs_error_bound(&b).unwrap(), 6.0);
    }
}
