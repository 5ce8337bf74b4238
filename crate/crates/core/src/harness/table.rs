//! Comma-separated tables with a header row, and exponent fits over them.

use crate::error::{Error, Result};
use crate::fit::ExponentFit;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Header row plus rows of equal length; quoting follows RFC 4180.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let parse_err = |e: csv::Error| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        };
        let header: Vec<String> = rdr.headers().map_err(parse_err)?.iter().map(str::to_string).collect();
        if header.is_empty() || header.iter().any(String::is_empty) {
            return Err(Error::Parse { line: 1, msg: "empty column name".into() });
        }
        let rows = rdr
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_string).collect()).map_err(parse_err))
            .collect::<Result<Vec<Vec<String>>>>()?;
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let c = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Precondition(format!("no column `{name}`")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(k, r)| {
                r[c].parse::<f64>().map_err(|_| Error::Parse {
                    line: k + 2,
                    msg: format!("`{}` in column {name} is not a number", r[c]),
                })
            })
            .collect()
    }
}

/// log₂ of a column; a column named `m` already holds log₂(1/δ).
fn log_column(t: &Table, name: &str) -> Result<Vec<f64>> {
    let v = t.column(name)?;
    if name == "m" {
        return Ok(v);
    }
    if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::Degenerate(format!("column {name} has non-positive values")));
    }
    Ok(v.iter().map(|x| x.log2()).collect())
}

/// Least-squares line of log₂ y against log₂ x over at least three rows.
pub fn fit_table(t: &Table, x: &str, y: &str) -> Result<ExponentFit> {
    if t.rows.len() < 3 {
        return Err(Error::Precondition(format!("{} rows, the fit needs 3", t.rows.len())));
    }
    let xs = log_column(t, x)?;
    let ys = log_column(t, y)?;
    ExponentFit::from_logs(xs.into_iter().zip(ys).collect())
}
