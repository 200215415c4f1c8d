//! Numeric CSV files with a one-line header and 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text for `header` and `rows`.
pub fn render<R: AsRef<[f64]>>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let row = row.as_ref();
        for (k, x) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{x:.16e}");
        }
        out.push('\n');
    }
    out
}

/// Header and rows of a numeric CSV file.
pub fn parse(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty csv".into()))?
        .split(',')
        .map(str::to_string)
        .collect::<Vec<_>>();
    let rows = lines
        .enumerate()
        .map(|(i, l)| {
            l.split(',')
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("csv row {}: bad number {c:?}", i + 2)))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

pub fn read(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    parse(&std::fs::read_to_string(path)?)
}
