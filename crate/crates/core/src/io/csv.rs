//! Plain CSV helpers. Floats use Rust's shortest round-trip representation.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn write_matrix<W: Write>(mut w: W, m: &Matrix) -> Result<()> {
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_matrix(text: &str) -> Result<Matrix> {
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_row)
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows)
}

fn parse_row(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("'{}' is not a number", t.trim())))
        })
        .collect()
}

/// Reads a vector written one value per line or comma separated. Lines
/// starting with `#` and a non-numeric first line (a header) are skipped.
pub fn read_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_row(line) {
            Ok(v) => out.extend(v),
            Err(_) if ln == 0 => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

pub fn read_vector_file(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    read_vector(&fs::read_to_string(path)?)
}

pub fn write_vector<W: Write>(mut w: W, v: &[f64]) -> Result<()> {
    for &x in v {
        writeln!(w, "{}", fmt_f64(x))?;
    }
    Ok(())
}
