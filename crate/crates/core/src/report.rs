//! CSV tables for plotting tools: one row per family member or grid cell.

use std::io::Write;

use serde::Serialize;

use crate::compression::{AustinBound, ScanTable};
use crate::error::Result;

/// Writes `rows` with a header line derived from the row type.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Renders `rows` to a CSV string.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv writer emits utf-8"))
}

#[derive(Debug, Serialize)]
struct ScanCsvRow {
    n: usize,
    alpha: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    iterations: Option<usize>,
    beta: Option<f64>,
    error: Option<String>,
}

impl ScanTable {
    /// One row per `(alpha, n)` cell, with the row's fitted `beta`.
    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<ScanCsvRow> = self
            .cells
            .iter()
            .map(|c| ScanCsvRow {
                n: c.n,
                alpha: c.alpha,
                lower: c.lower,
                upper: c.upper,
                iterations: c.iterations,
                beta: self.rows.iter().find(|r| r.alpha == c.alpha).and_then(|r| r.beta),
                error: c.error.clone(),
            })
            .collect();
        csv_string(&rows)
    }
}

impl AustinBound {
    pub fn to_csv(&self) -> Result<String> {
        csv_string(&self.members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        name: &'static str,
        value: f64,
        missing: Option<f64>,
    }

    #[test]
    fn header_and_empty_option() {
        let s = csv_string(&[Row {
            name: "a",
            value: 0.5,
            missing: None,
        }])
        .unwrap();
        assert_eq!(s, "name,value,missing\na,0.5,\n");
    }
}
