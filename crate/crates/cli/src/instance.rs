//! Plain-text instance files: one equation per line, `coefficients | rhs`.
//!
//! A `#` starts a comment (whole-line or trailing) and blank lines are
//! skipped. Numbers are whitespace-separated and written back with 17
//! significant digits, so a generate/parse round trip reproduces every
//! coefficient bit for bit.

use crate::output::f17;
use crate::{CliError, Result};
use relaxproj::{AffineSubspace, Matrix, Vector};
use std::fmt::Write as _;
use std::path::Path;

/// A linear system `M x = b` read from or written to an instance file. Each
/// row doubles as the hyperplane `{x : m_i . x = b_i}`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub matrix: Matrix,
    pub rhs: Vector,
}

impl Instance {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// One affine hyperplane per equation, in file order.
    pub fn hyperplanes(&self) -> Result<Vec<AffineSubspace>> {
        let mut out = Vec::with_capacity(self.rows());
        for i in 0..self.rows() {
            let normal = Vector::from_iterator(self.cols(), self.matrix.row(i).iter().cloned());
            out.push(AffineSubspace::hyperplane(&normal, self.rhs[i])?);
        }
        Ok(out)
    }
}

pub fn read(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

/// Parses instance text; `origin` names the source in error messages.
pub fn parse(text: &str, origin: &str) -> Result<Instance> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let pieces: Vec<&str> = line.split('|').collect();
        if pieces.len() < 2 {
            return Err(CliError::Config(format!(
                "{origin} line {line_no}: missing '|' between coefficients and right-hand side"
            )));
        }
        if pieces.len() > 2 {
            return Err(CliError::Config(format!(
                "{origin} line {line_no}: more than one '|'"
            )));
        }
        let coeffs = parse_numbers(pieces[0], origin, line_no)?;
        if coeffs.is_empty() {
            return Err(CliError::Config(format!(
                "{origin} line {line_no}: no coefficients before '|'"
            )));
        }
        let b = parse_numbers(pieces[1], origin, line_no)?;
        if b.len() != 1 {
            return Err(CliError::Config(format!(
                "{origin} line {line_no}: expected exactly one value after '|', found {}",
                b.len()
            )));
        }
        if let Some(width) = rows.first().map(Vec::len) {
            if coeffs.len() != width {
                return Err(CliError::Config(format!(
                    "{origin} line {line_no}: row has {} coefficients, previous rows have {width}",
                    coeffs.len()
                )));
            }
        }
        rows.push(coeffs);
        rhs.push(b[0]);
    }
    if rows.is_empty() {
        return Err(CliError::Config(format!("{origin}: no equations found")));
    }
    let (p, q) = (rows.len(), rows[0].len());
    let matrix = Matrix::from_fn(p, q, |i, j| rows[i][j]);
    Ok(Instance { matrix, rhs: Vector::from_vec(rhs) })
}

fn parse_numbers(text: &str, origin: &str, line_no: usize) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| {
                CliError::Config(format!("{origin} line {line_no}: '{tok}' is not a number"))
            })
        })
        .collect()
}

/// Renders a system in the instance format, comment lines first.
pub fn render(matrix: &Matrix, rhs: &Vector, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    for i in 0..matrix.nrows() {
        let row: Vec<String> = matrix.row(i).iter().map(|&v| f17(v)).collect();
        let _ = writeln!(out, "{} | {}", row.join(" "), f17(rhs[i]));
    }
    out
}
