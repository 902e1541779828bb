//! Dense symmetric matrices and the eigenvalue routines used throughout.
//!
//! Eigenvalues are computed by Householder reduction to tridiagonal form
//! followed by implicit QL iterations with Wilkinson shifts.

use std::collections::HashSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real symmetric matrix in full row-major storage. Constructors mirror the
/// upper triangle so symmetry holds exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds the matrix from `f(i, j)` evaluated for `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SymMatrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds from rows, rejecting asymmetry beyond rounding and non-finite
    /// entries. The upper triangle is kept.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::LengthMismatch { left: n, right: r.len() });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if !a.is_finite() {
                    return Err(Error::NonFinite { index: i * n + j });
                }
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// Principal submatrix on `indices` (kept in the order given).
    pub fn principal_submatrix(&self, indices: &[usize]) -> Result<SymMatrix> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("empty support".to_string()));
        }
        let mut seen = HashSet::new();
        for &i in indices {
            if i >= self.n {
                return Err(Error::InvalidInput(format!(
                    "support index {i} out of range for order {}",
                    self.n
                )));
            }
            if !seen.insert(i) {
                return Err(Error::InvalidInput(format!("support index {i} repeated")));
            }
        }
        Ok(Self::from_fn(indices.len(), |a, b| {
            self.get(indices[a], indices[b])
        }))
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        symmetric_eigenvalues(self)
    }
}

/// Smallest eigenvalue of `m`, or of its principal submatrix on `support`.
pub fn min_eigenvalue(m: &SymMatrix, support: Option<&[usize]>) -> Result<f64> {
    let ev = match support {
        Some(idx) => m.principal_submatrix(idx)?.eigenvalues()?,
        None => {
            if m.order() == 0 {
                return Err(Error::InvalidInput("empty matrix".to_string()));
            }
            m.eigenvalues()?
        }
    };
    Ok(ev[0])
}

/// Largest eigenvalue of `m`.
pub fn max_eigenvalue(m: &SymMatrix) -> Result<f64> {
    if m.order() == 0 {
        return Err(Error::InvalidInput("empty matrix".to_string()));
    }
    Ok(*m.eigenvalues()?.last().unwrap())
}

/// Largest absolute off-diagonal entry.
pub fn max_offdiag_abs(m: &SymMatrix) -> Result<f64> {
    let n = m.order();
    if n < 2 {
        return Err(Error::InvalidInput(
            "off-diagonal maximum needs order >= 2".to_string(),
        ));
    }
    let mut best = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            best = best.max(m.get(i, j).abs());
        }
    }
    Ok(best)
}

fn symmetric_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    let n = m.order();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut a, &mut d, &mut e);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.total_cmp(y));
    Ok(d)
}

/// Householder reduction of the symmetric matrix `a` (lower triangle used)
/// to tridiagonal form: diagonal in `d`, subdiagonal in `e[1..]`.
fn tridiagonalize(a: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = a.len();
    for i in (1..n).rev() {
        let l = i - 1;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i][k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i][l];
                continue;
            }
            let mut h = 0.0;
            for k in 0..=l {
                a[i][k] /= scale;
                h += a[i][k] * a[i][k];
            }
            let f = a[i][l];
            let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            a[i][l] = f - g;
            let mut f = 0.0;
            for j in 0..=l {
                let mut g = 0.0;
                for k in 0..=j {
                    g += a[j][k] * a[i][k];
                }
                for k in (j + 1)..=l {
                    g += a[k][j] * a[i][k];
                }
                e[j] = g / h;
                f += e[j] * a[i][j];
            }
            let hh = f / (h + h);
            for j in 0..=l {
                let f = a[i][j];
                let g = e[j] - hh * f;
                e[j] = g;
                for k in 0..=j {
                    a[j][k] -= f * e[k] + g * a[i][k];
                }
            }
        } else {
            e[i] = a[i][l];
        }
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[i][i];
    }
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// On return `d` holds the eigenvalues (unsorted).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    const MAX_ITER: usize = 60;
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(Error::NonConvergence {
                    iterations: MAX_ITER,
                    reason: "tridiagonal QL did not deflate".to_string(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky_lower(m: &SymMatrix) -> Result<DMatrix<f64>> {
    nalgebra::linalg::Cholesky::new(m.to_dmatrix())
        .map(|c| c.l())
        .ok_or(Error::NotPositiveDefinite)
}

/// Spectral radius of the companion matrix of `z^p - a_1 z^{p-1} - ... - a_p`,
/// i.e. the largest root modulus of the AR recursion with coefficients `a`.
/// Returns 0 for an empty coefficient vector.
pub fn companion_spectral_radius(a: &[f64]) -> f64 {
    let p = a.len();
    if p == 0 {
        return 0.0;
    }
    if p == 1 {
        return a[0].abs();
    }
    let mut c = DMatrix::<f64>::zeros(p, p);
    for (j, &v) in a.iter().enumerate() {
        c[(0, j)] = v;
    }
    for i in 1..p {
        c[(i, i - 1)] = 1.0;
    }
    c.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_eigenvalues() {
        let ev = SymMatrix::identity(5).eigenvalues().unwrap();
        assert!(ev.iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert_eq!(min_eigenvalue(&SymMatrix::identity(5), None).unwrap(), 1.0);
    }

    #[test]
    fn two_by_two() {
        let m = SymMatrix::from_rows(&[vec![1.0, 0.6], vec![0.6, 1.0]]).unwrap();
        assert!((min_eigenvalue(&m, None).unwrap() - 0.4).abs() < 1e-14);
        assert!((max_eigenvalue(&m).unwrap() - 1.6).abs() < 1e-14);
    }

    #[test]
    fn offdiag() {
        assert_eq!(max_offdiag_abs(&SymMatrix::identity(3)).unwrap(), 0.0);
        let m = SymMatrix::from_rows(&[vec![1.0, -0.7], vec![-0.7, 1.0]]).unwrap();
        assert_eq!(max_offdiag_abs(&m).unwrap(), 0.7);
        assert!(max_offdiag_abs(&SymMatrix::identity(1)).is_err());
    }

    #[test]
    fn support_restriction() {
        let m = SymMatrix::from_rows(&[
            vec![1.0, 0.9, 0.0],
            vec![0.9, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!((min_eigenvalue(&m, Some(&[0, 2])).unwrap() - 1.0).abs() < 1e-14);
        assert!((min_eigenvalue(&m, Some(&[1, 0])).unwrap() - 0.1).abs() < 1e-14);
        assert!(min_eigenvalue(&m, Some(&[])).is_err());
        assert!(min_eigenvalue(&m, Some(&[0, 0])).is_err());
        assert!(min_eigenvalue(&m, Some(&[3])).is_err());
    }

    #[test]
    fn diagonal_and_already_tridiagonal() {
        let m = SymMatrix::from_fn(4, |i, j| if i == j { (4 - i) as f64 } else { 0.0 });
        assert_eq!(m.eigenvalues().unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        // 1-2-1 Toeplitz tridiagonal: eigenvalues 2 - 2cos(k pi / (n+1))
        let n = 6;
        let t = SymMatrix::from_fn(n, |i, j| match j - i {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let ev = t.eigenvalues().unwrap();
        for (k, v) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * (((k + 1) as f64) * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_rows_rejected() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
    }

    #[test]
    fn companion_radius() {
        assert_eq!(companion_spectral_radius(&[]), 0.0);
        assert!((companion_spectral_radius(&[0.5]) - 0.5).abs() < 1e-15);
        // (1 - 0.5L)(1 - 0.4L): roots 0.5 and 0.4
        assert!((companion_spectral_radius(&[0.9, -0.2]) - 0.5).abs() < 1e-12);
        // complex pair with modulus sqrt(0.5)
        assert!((companion_spectral_radius(&[1.0, -0.5]) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(cholesky_lower(&m).unwrap_err(), Error::NotPositiveDefinite);
    }
}
