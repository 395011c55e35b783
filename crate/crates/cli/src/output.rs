//! Trace serialization: the CSV layout shared by `run` and `kaczmarz` and
//! read back by `figure`, plus the float formatting used by every artifact.

use crate::{CliError, Result};
use relaxproj::IterationTrace;
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits: enough to reproduce any 64-bit float exactly, and
/// the same bytes on every platform.
pub fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

fn coord_count(d: usize, full: bool) -> usize {
    if full {
        d
    } else {
        d.min(2)
    }
}

/// Header row for a trace of ambient dimension `d`: the step counter, the
/// index and relaxation parameter that produced the iterate, the leading
/// coordinates (all of them in full-vector mode), and the norm.
pub fn trace_header(d: usize, full: bool) -> String {
    let mut cols = vec!["step".to_string(), "chosen_index".to_string(), "lambda".to_string()];
    for j in 1..=coord_count(d, full) {
        cols.push(format!("x_{j}"));
    }
    cols.push("norm".to_string());
    cols.join(",")
}

fn push_row(
    out: &mut String,
    trace: &IterationTrace,
    n: usize,
    n_coords: usize,
) -> Result<()> {
    let iterates = trace.iterates.as_ref().expect("checked by caller");
    let x = &iterates[n];
    let (index, lambda) = if n == 0 {
        (-1i64, 0.0)
    } else {
        (trace.chosen_indices[n - 1] as i64, trace.lambdas[n - 1])
    };
    let norm = trace.norms[n];
    if !lambda.is_finite() || !norm.is_finite() || !x.iter().all(|t| t.is_finite()) {
        return Err(CliError::Anomaly(format!(
            "non-finite value in iterate {n}; refusing to write the trace"
        )));
    }
    let _ = write!(out, "{n},{index},{}", f17(lambda));
    for j in 0..n_coords {
        let _ = write!(out, ",{}", f17(x[j]));
    }
    let _ = writeln!(out, ",{}", f17(norm));
    Ok(())
}

/// Renders a trace as CSV, one row per iterate including the start. Row
/// `n >= 1` records the index and relaxation parameter that produced iterate
/// `n`; row 0 carries the start with index -1 and parameter 0.
pub fn trace_csv(trace: &IterationTrace, full: bool) -> Result<String> {
    let iterates = trace
        .iterates
        .as_ref()
        .ok_or_else(|| CliError::Config("trace was recorded without iterates".to_string()))?;
    let d = iterates[0].len();
    let n_coords = coord_count(d, full);
    let mut out = String::with_capacity(iterates.len() * (24 * (n_coords + 2)));
    let _ = writeln!(out, "{}", trace_header(d, full));
    for n in 0..iterates.len() {
        push_row(&mut out, trace, n, n_coords)?;
    }
    Ok(out)
}

/// The rows of [`trace_csv`] at steps `ell, 2 ell, ...`: the orbit of the
/// full cyclic composition. Same header as the parent trace.
pub fn cycle_csv(trace: &IterationTrace, ell: usize, full: bool) -> Result<String> {
    if ell == 0 {
        return Err(CliError::Config("cycle length must be positive".to_string()));
    }
    let iterates = trace
        .iterates
        .as_ref()
        .ok_or_else(|| CliError::Config("trace was recorded without iterates".to_string()))?;
    let d = iterates[0].len();
    let n_coords = coord_count(d, full);
    let mut out = String::new();
    let _ = writeln!(out, "{}", trace_header(d, full));
    let mut n = ell;
    while n < iterates.len() {
        push_row(&mut out, trace, n, n_coords)?;
        n += ell;
    }
    Ok(out)
}

/// Residual history of a Kaczmarz run: system residual and distance to the
/// least-squares solution per step.
pub fn residuals_csv(residuals: &[f64], lsq_distance: &[f64]) -> Result<String> {
    let mut out = String::from("step,residual,lsq_distance\n");
    for (n, (r, d)) in residuals.iter().zip(lsq_distance).enumerate() {
        if !r.is_finite() || !d.is_finite() {
            return Err(CliError::Anomaly(format!("non-finite residual at step {n}")));
        }
        let _ = writeln!(out, "{n},{},{}", f17(*r), f17(*d));
    }
    Ok(out)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}
