//! Panel CSV reader. Layout: header row `date,<name>,...`; second row
//! `tcode,<code>,...`; then one row per period with an ISO date
//! (`YYYY-MM-DD`) and one value per series.

use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use sercorr::forecast::{apply_tcode, Tcode};
use sercorr::statcore::{Series, SeriesPanel};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct RawPanel {
    pub dates: Vec<NaiveDate>,
    pub names: Vec<String>,
    pub tcodes: Vec<Tcode>,
    /// Untransformed columns.
    pub columns: Vec<Vec<f64>>,
}

/// Transformed panel aligned on the rows every column has.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub raw: RawPanel,
    pub panel: SeriesPanel,
    /// Row of `raw` where the aligned panel starts.
    pub first_row: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestReport {
    pub columns: usize,
    pub raw_rows: usize,
    pub aligned_rows: usize,
    pub rows_dropped: usize,
    pub first_date: String,
    pub last_date: String,
    pub tcode_counts: Vec<(u8, usize)>,
}

pub fn read_raw(path: &Path) -> Result<RawPanel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_raw(&text)
}

pub fn parse_raw(text: &str) -> Result<RawPanel, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let mut next = |what: &str| -> Result<(usize, csv::StringRecord), CliError> {
        match records.next() {
            Some(Ok(r)) => Ok((r.position().map_or(0, |p| p.line() as usize), r)),
            Some(Err(e)) => Err(CliError::Data(format!("malformed CSV: {e}"))),
            None => Err(CliError::Data(format!("missing {what} row"))),
        }
    };
    let (_, header) = next("header")?;
    if header.len() < 2 {
        return Err(CliError::Data("line 1: need a date column and at least one series".to_string()));
    }
    let names: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    let n = names.len();
    let (line, codes) = next("tcode")?;
    if codes.len() != n + 1 {
        return Err(CliError::Data(format!(
            "line {line}: expected {} fields, found {}",
            n + 1,
            codes.len()
        )));
    }
    let tcodes = codes
        .iter()
        .skip(1)
        .enumerate()
        .map(|(j, s)| {
            s.trim()
                .parse::<u8>()
                .ok()
                .and_then(|c| Tcode::new(c).ok())
                .ok_or_else(|| {
                    CliError::Data(format!(
                        "line {line}, column {} ({}): invalid tcode {s:?} (expected 1-7)",
                        j + 2,
                        names[j]
                    ))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut dates = Vec::new();
    let mut columns = vec![Vec::new(); n];
    for rec in records {
        let rec = rec.map_err(|e| CliError::Data(format!("malformed CSV: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != n + 1 {
            return Err(CliError::Data(format!(
                "line {line}: expected {} fields, found {}",
                n + 1,
                rec.len()
            )));
        }
        let d = rec[0].trim();
        let date = NaiveDate::parse_from_str(d, "%Y-%m-%d")
            .map_err(|_| CliError::Data(format!("line {line}, column 1: invalid date {d:?}")))?;
        if dates.last().is_some_and(|prev| *prev >= date) {
            return Err(CliError::Data(format!("line {line}: dates must be strictly increasing")));
        }
        dates.push(date);
        for j in 0..n {
            let s = rec[j + 1].trim();
            let v: f64 = s.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
                CliError::Data(format!(
                    "line {line}, column {} ({}): invalid number {s:?}",
                    j + 2,
                    names[j]
                ))
            })?;
            columns[j].push(v);
        }
    }
    if dates.is_empty() {
        return Err(CliError::Data("no observations".to_string()));
    }
    Ok(RawPanel { dates, names, tcodes, columns })
}

/// Applies the transformation codes of the listed columns and aligns them
/// on the shortest transformed sample.
pub fn transform(raw: &RawPanel, keep: &[usize]) -> Result<(SeriesPanel, usize), CliError> {
    let first_row = keep.iter().map(|&j| raw.tcodes[j].rows_lost()).max().unwrap_or(0);
    let mut cols = Vec::with_capacity(keep.len());
    for &j in keep {
        let s = Series::new(raw.columns[j].clone())?;
        let code = raw.tcodes[j];
        let t = apply_tcode(&s, code).map_err(|e| {
            CliError::Data(format!("column {} ({}), tcode {}: {e}", j + 2, raw.names[j], code.code()))
        })?;
        let skip = first_row - code.rows_lost();
        cols.push(t.slice(skip..t.len()));
    }
    let names = keep.iter().map(|&j| raw.names[j].clone()).collect();
    let tcodes = keep.iter().map(|&j| raw.tcodes[j]).collect();
    let panel = SeriesPanel::new(cols, names)?.with_tcodes(tcodes)?;
    Ok((panel, first_row))
}

pub fn ingest(path: &Path) -> Result<Ingested, CliError> {
    let raw = read_raw(path)?;
    let all: Vec<usize> = (0..raw.names.len()).collect();
    let (panel, first_row) = transform(&raw, &all)?;
    Ok(Ingested { raw, panel, first_row })
}

impl Ingested {
    pub fn report(&self) -> IngestReport {
        let mut counts = [0usize; 8];
        for t in &self.raw.tcodes {
            counts[t.code() as usize] += 1;
        }
        IngestReport {
            columns: self.panel.n_cols(),
            raw_rows: self.raw.dates.len(),
            aligned_rows: self.panel.n_rows(),
            rows_dropped: self.first_row,
            first_date: self.raw.dates[self.first_row].to_string(),
            last_date: self.raw.dates.last().expect("nonempty").to_string(),
            tcode_counts: (1..=7u8).filter(|c| counts[*c as usize] > 0).map(|c| (c, counts[c as usize])).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "date,a,b,c\ntcode,1,2,5\n2000-01-01,1,1,1\n2000-02-01,2,3,2\n2000-03-01,3,6,4\n";

    #[test]
    fn aligns_to_shortest() {
        let raw = parse_raw(GOOD).unwrap();
        let (p, first) = transform(&raw, &[0, 1, 2]).unwrap();
        assert_eq!(first, 1);
        assert_eq!(p.n_rows(), 2);
        assert_eq!(p.column(0).values(), &[2.0, 3.0]);
        assert_eq!(p.column(1).values(), &[2.0, 3.0]);
        assert!((p.column(2)[1] - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn unknown_tcode_names_column() {
        let err = parse_raw("date,a,b\ntcode,1,9\n2000-01-01,1,1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(b)") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn thousands_separator_rejected_with_line() {
        let err = parse_raw("date,a\ntcode,1\n2000-01-01,1\n2000-02-01,\"1,000\"\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        let err = parse_raw("date,a\ntcode,1\n2000-01-01,1,000\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn log_code_on_nonpositive_value() {
        let raw = parse_raw("date,a\ntcode,5\n2000-01-01,1\n2000-02-01,-1\n").unwrap();
        let err = transform(&raw, &[0]).unwrap_err();
        assert!(matches!(err, CliError::Data(_)));
        assert!(err.to_string().contains("(a)"));
    }
}
