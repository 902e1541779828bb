use serde::{Deserialize, Serialize};

use crate::statcore::pairwise_sum;

/// Mean and standard deviation (divisor `n - 1`) over the finite values of
/// a replication sample; `n` counts the finite values used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl MeanSd {
    pub fn from_values(values: &[f64]) -> Self {
        let v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        let n = v.len();
        if n == 0 {
            return MeanSd { mean: f64::NAN, sd: f64::NAN, n };
        }
        let mean = pairwise_sum(&v) / n as f64;
        let sd = if n > 1 {
            let sq: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
            (pairwise_sum(&sq) / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        MeanSd { mean, sd, n }
    }

    pub fn variance(&self) -> f64 {
        self.sd * self.sd
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        self.sd / (self.n as f64).sqrt()
    }
}

/// Equal-width histogram on `[lo, hi]`, normalized to a density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn new(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let mut counts = vec![0u64; bins];
        let width = (hi - lo) / bins as f64;
        let mut total = 0u64;
        for &v in values {
            if !(lo..=hi).contains(&v) {
                continue;
            }
            let k = (((v - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
            total += 1;
        }
        let density = counts
            .iter()
            .map(|&c| if total == 0 { 0.0 } else { c as f64 / (total as f64 * width) })
            .collect();
        Histogram { lo, hi, counts, density }
    }

    pub fn centers(&self) -> Vec<f64> {
        let bins = self.counts.len();
        let width = (self.hi - self.lo) / bins as f64;
        (0..bins).map(|k| self.lo + (k as f64 + 0.5) * width).collect()
    }

    /// Two-column CSV `center,density`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("center,density\n");
        for (c, d) in self.centers().iter().zip(&self.density) {
            out.push_str(&format!("{c},{d}\n"));
        }
        out
    }
}

/// Results of one configuration of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCell {
    pub params: Vec<(String, String)>,
    pub metrics: Vec<(String, MeanSd)>,
    pub histogram: Option<Histogram>,
    pub draws: Option<Vec<f64>>,
}

impl McCell {
    pub fn new(params: Vec<(String, String)>) -> Self {
        McCell { params, metrics: Vec::new(), histogram: None, draws: None }
    }

    pub fn push(&mut self, name: impl Into<String>, values: &[f64]) {
        self.metrics.push((name.into(), MeanSd::from_values(values)));
    }

    pub fn metric(&self, name: &str) -> Option<&MeanSd> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn param(&self, name: &str) -> Option<&str> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }
}

/// Replication statistics of an experiment, one cell per configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub experiment: String,
    pub replications: usize,
    pub base_seed: u64,
    pub cells: Vec<McCell>,
}

impl McSummary {
    /// One row per cell: parameters, then `<metric>_mean,<metric>_sd` for
    /// every metric of the first cell.
    pub fn to_csv(&self) -> String {
        let Some(first) = self.cells.first() else {
            return String::new();
        };
        let mut header: Vec<String> = first.params.iter().map(|(k, _)| k.clone()).collect();
        for (name, _) in &first.metrics {
            header.push(format!("{name}_mean"));
            header.push(format!("{name}_sd"));
        }
        let mut out = header.join(",");
        out.push('\n');
        for cell in &self.cells {
            let mut row: Vec<String> = first
                .params
                .iter()
                .map(|(k, _)| cell.param(k).unwrap_or("").to_string())
                .collect();
            for (name, _) in &first.metrics {
                match cell.metric(name) {
                    Some(m) => {
                        row.push(format!("{}", m.mean));
                        row.push(format!("{}", m.sd));
                    }
                    None => {
                        row.push(String::new());
                        row.push(String::new());
                    }
                }
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    /// Cell whose parameters include all of `matches`.
    pub fn cell(&self, matches: &[(&str, &str)]) -> Option<&McCell> {
        self.cells
            .iter()
            .find(|c| matches.iter().all(|(k, v)| c.param(k) == Some(*v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_sd_skips_non_finite() {
        let m = MeanSd::from_values(&[1.0, 2.0, f64::NAN, 3.0]);
        assert_eq!(m.n, 3);
        assert_eq!(m.mean, 2.0);
        assert_eq!(m.sd, 1.0);
    }

    #[test]
    fn histogram_integrates_to_one() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 / 999.0) * 2.0 - 1.0).collect();
        let h = Histogram::new(&v, -1.0, 1.0, 101);
        let w = 2.0 / 101.0;
        let total: f64 = h.density.iter().map(|d| d * w).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(h.counts.iter().sum::<u64>(), 1000);
    }

    #[test]
    fn csv_layout() {
        let mut c = McCell::new(vec![("phi".into(), "0.5".into())]);
        c.push("err", &[1.0, 3.0]);
        let s = McSummary { experiment: "x".into(), replications: 2, base_seed: 1, cells: vec![c] };
        assert_eq!(s.to_csv(), format!("phi,err_mean,err_sd\n0.5,2,{}\n", 2f64.sqrt()));
    }
}
