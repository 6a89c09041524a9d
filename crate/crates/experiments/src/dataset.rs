//! Tabular results and the summary statistics used to aggregate them.
//!
//! Cells are stored already formatted so that writing a dataset is a pure
//! function of its contents. Floats use the shortest representation that
//! round-trips (`{:e}`); missing values are empty cells.

use crate::error::{ExperimentError, Result};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// File stem; the dataset is written to `<name>.csv`.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Formats a float for a CSV cell; non-finite values become missing.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        String::new()
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl Dataset {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Dataset { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column, with missing or unparsable cells as `None`.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.column(name)?;
        Some(self.rows.iter().map(|r| r[j].parse::<f64>().ok()).collect())
    }

    /// Rows whose cells equal the given values, e.g. `[("quantizer", "sign")]`.
    pub fn filter(&self, conditions: &[(&str, &str)]) -> Dataset {
        let idx: Vec<(usize, &str)> =
            conditions.iter().map(|(c, v)| (self.column(c).unwrap_or(usize::MAX), *v)).collect();
        let rows = self
            .rows
            .iter()
            .filter(|r| idx.iter().all(|&(j, v)| j < r.len() && r[j] == v))
            .cloned()
            .collect();
        Dataset { name: self.name.clone(), columns: self.columns.clone(), rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            // cells never contain commas, quotes or newlines
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn from_csv(name: &str, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| ExperimentError::Config(format!("{name}: empty CSV")))?;
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
            if row.len() != columns.len() {
                return Err(ExperimentError::Config(format!(
                    "{name}: row {} has {} cells, header has {}",
                    i + 1,
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Dataset { name: name.to_string(), columns, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
        Self::from_csv(name, &std::fs::read_to_string(path)?)
    }

    pub fn write(&self, dir: &Path) -> Result<std::path::PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        std::fs::write(&path, self.to_csv())?;
        Ok(path)
    }
}

/// Linear-interpolation quantile of sorted data (`q ∈ [0, 1]`).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Median and quartiles of the finite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub count: usize,
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(Summary {
        median: quantile_sorted(&v, 0.5),
        q1: quantile_sorted(&v, 0.25),
        q3: quantile_sorted(&v, 0.75),
        count: v.len(),
    })
}

pub fn median(values: &[f64]) -> Option<f64> {
    summarize(values).map(|s| s.median)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_preserves_floats() {
        let mut d = Dataset::new("t", &["a", "b"]);
        let x = 0.1 + 0.2;
        d.push(vec![fmt_f64(x), fmt_opt(None)]);
        d.push(vec![fmt_f64(1e-300), fmt_f64(f64::NAN)]);
        let back = Dataset::from_csv("t", &d.to_csv()).unwrap();
        assert_eq!(back, d);
        let col = back.numeric_column("a").unwrap();
        assert_eq!(col[0], Some(x));
        assert_eq!(back.numeric_column("b").unwrap(), vec![None, None]);
    }

    #[test]
    fn ragged_csv_is_rejected() {
        assert!(Dataset::from_csv("t", "a,b\n1\n").is_err());
        assert!(Dataset::from_csv("t", "").is_err());
    }

    #[test]
    fn quartiles_interpolate() {
        let s = summarize(&[4.0, 1.0, 3.0, 2.0, f64::NAN]).unwrap();
        assert_eq!(s.count, 4);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.q3, 3.25);
        assert!(summarize(&[f64::NAN]).is_none());
    }

    #[test]
    fn filter_matches_all_conditions() {
        let mut d = Dataset::new("t", &["q", "m"]);
        d.push(vec!["sign".into(), "1".into()]);
        d.push(vec!["none".into(), "1".into()]);
        d.push(vec!["sign".into(), "2".into()]);
        assert_eq!(d.filter(&[("q", "sign")]).rows.len(), 2);
        assert_eq!(d.filter(&[("q", "sign"), ("m", "2")]).rows.len(), 1);
        assert_eq!(d.filter(&[("missing", "x")]).rows.len(), 0);
    }
}
