//! Conditional-sum-of-squares refinement of ARMA coefficients by
//! Levenberg-Marquardt with recursively computed residual derivatives.

use nalgebra::{DMatrix, DVector};

use crate::statcore::companion_spectral_radius;

/// Parameter vector layout: `[c, phi_1..phi_p, theta_1..theta_q]`.
pub(crate) struct CssProblem<'a> {
    pub x: &'a [f64],
    pub p: usize,
    pub q: usize,
}

pub(crate) struct CssOutcome {
    pub params: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

const ADMISSIBLE_RADIUS: f64 = 1.0 - 1e-8;

impl CssProblem<'_> {
    fn split<'b>(&self, b: &'b [f64]) -> (f64, &'b [f64], &'b [f64]) {
        (b[0], &b[1..1 + self.p], &b[1 + self.p..])
    }

    /// Residuals `e_t`, `t = p..T-1`, with zero pre-sample residuals.
    pub fn residuals(&self, b: &[f64]) -> Vec<f64> {
        let (c, phi, theta) = self.split(b);
        let (p, t) = (self.p, self.x.len());
        let mut e = vec![0.0; t - p];
        for s in p..t {
            let mut v = self.x[s] - c;
            for (l, f) in phi.iter().enumerate() {
                v -= f * self.x[s - l - 1];
            }
            for (k, th) in theta.iter().enumerate() {
                if s > p + k {
                    v -= th * e[s - p - k - 1];
                }
            }
            e[s - p] = v;
        }
        e
    }

    fn jacobian(&self, b: &[f64], e: &[f64]) -> DMatrix<f64> {
        let (_, _, theta) = self.split(b);
        let (p, t) = (self.p, self.x.len());
        let n = t - p;
        let k = 1 + self.p + self.q;
        let mut j = DMatrix::<f64>::zeros(n, k);
        for r in 0..n {
            let s = r + p;
            for col in 0..k {
                let mut v = if col == 0 {
                    -1.0
                } else if col <= self.p {
                    -self.x[s - col]
                } else {
                    let lag = col - self.p;
                    if r >= lag {
                        -e[r - lag]
                    } else {
                        0.0
                    }
                };
                for (kk, th) in theta.iter().enumerate() {
                    if r > kk {
                        v -= th * j[(r - kk - 1, col)];
                    }
                }
                j[(r, col)] = v;
            }
        }
        j
    }

    pub fn admissible(&self, b: &[f64]) -> bool {
        let (_, phi, theta) = self.split(b);
        if b.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let neg_theta: Vec<f64> = theta.iter().map(|v| -v).collect();
        companion_spectral_radius(phi) < ADMISSIBLE_RADIUS
            && companion_spectral_radius(&neg_theta) < ADMISSIBLE_RADIUS
    }

    pub fn minimize(&self, start: &[f64], max_iter: usize) -> CssOutcome {
        let sse = |e: &[f64]| e.iter().map(|v| v * v).sum::<f64>();
        let mut b = start.to_vec();
        let mut e = self.residuals(&b);
        let mut cur = sse(&e);
        let mut mu = 1e-3;
        let k = b.len();
        for iter in 0..max_iter {
            let j = self.jacobian(&b, &e);
            let jtj = j.transpose() * &j;
            let g = j.transpose() * DVector::from_column_slice(&e);
            let mut improved = false;
            let mut small_step = false;
            for _ in 0..30 {
                let mut a = jtj.clone();
                for d in 0..k {
                    a[(d, d)] += mu * jtj[(d, d)].max(1e-12);
                }
                let Some(delta) = a.lu().solve(&(-&g)) else {
                    mu *= 10.0;
                    continue;
                };
                let cand: Vec<f64> = b.iter().zip(delta.iter()).map(|(x, d)| x + d).collect();
                if !self.admissible(&cand) {
                    mu *= 10.0;
                    continue;
                }
                let e_new = self.residuals(&cand);
                let s_new = sse(&e_new);
                if s_new <= cur {
                    let rel = (cur - s_new) / cur.max(f64::MIN_POSITIVE);
                    small_step = rel < 1e-10
                        || delta.amax() < 1e-9 * (1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs())));
                    b = cand;
                    e = e_new;
                    cur = s_new;
                    mu = (mu * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
                mu *= 10.0;
            }
            if !improved || small_step {
                // no admissible descent direction left: stationary point
                return CssOutcome {
                    params: b,
                    converged: true,
                    iterations: iter + 1,
                };
            }
        }
        CssOutcome {
            params: b,
            converged: false,
            iterations: max_iter,
        }
    }
}
