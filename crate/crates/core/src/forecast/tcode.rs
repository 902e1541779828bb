use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statcore::Series;

/// Stationarity-inducing transformation code of a macroeconomic series:
///
/// | code | transformation            | rows lost |
/// |------|---------------------------|-----------|
/// | 1    | none                      | 0 |
/// | 2    | `x_t - x_{t-1}`           | 1 |
/// | 3    | second difference         | 2 |
/// | 4    | `ln x_t`                  | 0 |
/// | 5    | `ln x_t - ln x_{t-1}`     | 1 |
/// | 6    | second difference of logs | 2 |
/// | 7    | `r_t - r_{t-1}` with `r_t = x_t / x_{t-1} - 1` | 2 |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Tcode(u8);

impl Tcode {
    pub fn new(code: u8) -> Result<Self> {
        if (1..=7).contains(&code) {
            Ok(Tcode(code))
        } else {
            Err(Error::InvalidInput(format!("unknown tcode {code} (expected 1..7)")))
        }
    }

    pub fn code(self) -> u8 {
        self.0
    }

    /// Number of leading observations consumed by the transformation.
    pub fn rows_lost(self) -> usize {
        match self.0 {
            1 | 4 => 0,
            2 | 5 => 1,
            _ => 2,
        }
    }

    pub fn uses_log(self) -> bool {
        matches!(self.0, 4..=6)
    }
}

impl TryFrom<u8> for Tcode {
    type Error = Error;

    fn try_from(code: u8) -> Result<Self> {
        Tcode::new(code)
    }
}

impl From<Tcode> for u8 {
    fn from(t: Tcode) -> u8 {
        t.0
    }
}

fn diff(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

fn logs(v: &[f64]) -> Result<Vec<f64>> {
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            if x > 0.0 {
                Ok(x.ln())
            } else {
                Err(Error::Domain(format!(
                    "log transformation of non-positive value {x} at index {i}"
                )))
            }
        })
        .collect()
}

/// Applies `code` to `s`; the output is shorter by `code.rows_lost()`.
pub fn apply_tcode(s: &Series, code: Tcode) -> Result<Series> {
    let needed = code.rows_lost() + 1;
    if s.len() < needed {
        return Err(Error::TooShort { needed, got: s.len() });
    }
    let out = match code.0 {
        1 => s.to_vec(),
        2 => diff(s),
        3 => diff(&diff(s)),
        4 => logs(s)?,
        5 => diff(&logs(s)?),
        6 => diff(&diff(&logs(s)?)),
        _ => {
            let ratios = s
                .windows(2)
                .enumerate()
                .map(|(i, w)| {
                    if w[0] == 0.0 {
                        Err(Error::Domain(format!("growth ratio with zero base at index {i}")))
                    } else {
                        Ok(w[1] / w[0] - 1.0)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            diff(&ratios)
        }
    };
    Series::new(out)
}

/// Inflation target and regressand built from a price index.
///
/// With `p_s = ln cpi_s`, element `k` of `target` is the realization at time
/// `s = target_start + k` of
/// `(1200/h)(p_s - p_{s-h}) - 1200(p_{s-h} - p_{s-h-1})`,
/// i.e. average annualized inflation over the `h` periods ending at `s` minus
/// the one-period inflation at the forecast origin `s - h`.
/// Element `k` of `regressand` is `1200 (p_s - 2 p_{s-1} + p_{s-2})` at time
/// `s = regressand_start + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSeries {
    pub h: usize,
    pub target: Series,
    pub target_start: usize,
    pub regressand: Series,
    pub regressand_start: usize,
}

pub fn target_transform(cpi: &Series, h: usize) -> Result<TargetSeries> {
    if h == 0 {
        return Err(Error::Domain("horizon must be at least 1".to_string()));
    }
    if cpi.len() <= h + 2 {
        return Err(Error::TooShort { needed: h + 3, got: cpi.len() });
    }
    let p = logs(cpi)?;
    let hf = h as f64;
    let target = (h + 1..p.len())
        .map(|s| 1200.0 / hf * (p[s] - p[s - h]) - 1200.0 * (p[s - h] - p[s - h - 1]))
        .collect();
    let regressand = (2..p.len())
        .map(|s| 1200.0 * (p[s] - 2.0 * p[s - 1] + p[s - 2]))
        .collect();
    Ok(TargetSeries {
        h,
        target: Series::new(target)?,
        target_start: h + 1,
        regressand: Series::new(regressand)?,
        regressand_start: 2,
    })
}
