use std::collections::HashSet;
use std::ops::{Deref, Range};

use serde::{Deserialize, Serialize};

use super::linalg::SymMatrix;
use crate::error::{Error, Result};
use crate::forecast::Tcode;

/// An ordered sequence of finite real observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Series(Vec<f64>);

impl Series {
    /// Wraps `values`, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Series(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn mean(&self) -> Result<f64> {
        require_len(self.len(), 1)?;
        Ok(pairwise_sum(&self.0) / self.len() as f64)
    }

    /// Sample variance with divisor `T - 1`.
    pub fn variance(&self) -> Result<f64> {
        require_len(self.len(), 2)?;
        let m = self.mean()?;
        let sq: Vec<f64> = self.0.iter().map(|v| (v - m) * (v - m)).collect();
        Ok(pairwise_sum(&sq) / (self.len() - 1) as f64)
    }

    /// Deviations from the sample mean.
    pub fn centered(&self) -> Result<Series> {
        let m = self.mean()?;
        Ok(Series(self.0.iter().map(|v| v - m).collect()))
    }

    pub fn slice(&self, range: Range<usize>) -> Series {
        Series(self.0[range].to_vec())
    }
}

impl Deref for Series {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Series::new(values)
    }
}

impl From<Series> for Vec<f64> {
    fn from(s: Series) -> Vec<f64> {
        s.0
    }
}

/// A `T x n` panel stored column-wise, with a name per column and optional
/// transformation codes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPanel {
    columns: Vec<Series>,
    names: Vec<String>,
    tcodes: Option<Vec<Tcode>>,
}

impl SeriesPanel {
    pub fn new(columns: Vec<Series>, names: Vec<String>) -> Result<Self> {
        if columns.len() != names.len() {
            return Err(Error::LengthMismatch {
                left: columns.len(),
                right: names.len(),
            });
        }
        if let Some(first) = columns.first() {
            for c in &columns[1..] {
                if c.len() != first.len() {
                    return Err(Error::LengthMismatch {
                        left: first.len(),
                        right: c.len(),
                    });
                }
            }
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate column name `{name}`")));
            }
        }
        Ok(SeriesPanel {
            columns,
            names,
            tcodes: None,
        })
    }

    /// Builds a panel from raw columns named `x1, x2, ...`.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let names = (1..=columns.len()).map(|i| format!("x{i}")).collect();
        let columns = columns
            .into_iter()
            .map(Series::new)
            .collect::<Result<Vec<_>>>()?;
        SeriesPanel::new(columns, names)
    }

    pub fn with_tcodes(mut self, tcodes: Vec<Tcode>) -> Result<Self> {
        if tcodes.len() != self.columns.len() {
            return Err(Error::LengthMismatch {
                left: self.columns.len(),
                right: tcodes.len(),
            });
        }
        self.tcodes = Some(tcodes);
        Ok(self)
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.len())
    }

    pub fn column(&self, i: usize) -> &Series {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[Series] {
        &self.columns
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn tcodes(&self) -> Option<&[Tcode]> {
        self.tcodes.as_deref()
    }

    pub fn into_columns(self) -> Vec<Series> {
        self.columns
    }

    /// Keeps rows in `range` for every column.
    pub fn slice_rows(&self, range: Range<usize>) -> SeriesPanel {
        SeriesPanel {
            columns: self.columns.iter().map(|c| c.slice(range.clone())).collect(),
            names: self.names.clone(),
            tcodes: self.tcodes.clone(),
        }
    }

    /// Keeps the listed columns, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<SeriesPanel> {
        let columns = indices
            .iter()
            .map(|&i| {
                self.columns
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput(format!("column index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        let names = indices.iter().map(|&i| self.names[i].clone()).collect();
        let mut out = SeriesPanel::new(columns, names)?;
        if let Some(t) = &self.tcodes {
            out.tcodes = Some(indices.iter().map(|&i| t[i]).collect());
        }
        Ok(out)
    }
}

pub(crate) fn require_len(got: usize, needed: usize) -> Result<()> {
    if got < needed {
        Err(Error::TooShort { needed, got })
    } else {
        Ok(())
    }
}

/// Pairwise (cascade) summation; result does not depend on how the work that
/// produced `values` was scheduled.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rescales `s` to mean 0 and unit variance (divisor `T - 1`).
pub fn standardize(s: &Series) -> Result<Series> {
    require_len(s.len(), 2)?;
    let m = s.mean()?;
    let var = s.variance()?;
    let max_abs = s.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(var > 0.0) || var.sqrt() <= 1e-14 * max_abs {
        return Err(Error::DegenerateVariance(
            "series is constant".to_string(),
        ));
    }
    let sd = var.sqrt();
    Ok(Series(s.iter().map(|v| (v - m) / sd).collect()))
}

/// Pearson sample correlation.
pub fn sample_correlation(x: &Series, y: &Series) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    require_len(x.len(), 2)?;
    corr_slices(x, y)
}

pub(crate) fn corr_slices(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if !(sxx > 0.0) || !(syy > 0.0) {
        return Err(Error::DegenerateVariance(
            "correlation with a constant series".to_string(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Sample correlation matrix of the panel columns. Columns are standardized
/// first, so this is also the sample cross-covariance of the standardized data.
pub fn correlation_matrix(panel: &SeriesPanel) -> Result<SymMatrix> {
    let n = panel.n_cols();
    if n == 0 {
        return Err(Error::InvalidInput("empty panel".to_string()));
    }
    require_len(panel.n_rows(), 2)?;
    let z = panel
        .columns()
        .iter()
        .map(standardize)
        .collect::<Result<Vec<_>>>()?;
    let denom = (panel.n_rows() - 1) as f64;
    Ok(SymMatrix::from_fn(n, |i, j| {
        if i == j {
            1.0
        } else {
            (dot(&z[i], &z[j]) / denom).clamp(-1.0, 1.0)
        }
    }))
}
