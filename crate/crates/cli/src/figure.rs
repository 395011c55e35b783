//! Deterministic SVG rendering of trace files: one panel per trace laid out
//! on a two-column grid, each showing the first two iterate coordinates as a
//! polyline. A panel whose trace has a sibling `<stem>_cycle.csv` overlays
//! those points as markers, so cyclic runs show the orbit of the full
//! composition on top of the step-by-step path.

use crate::{CliError, Result};
use std::fmt::Write as _;
use std::path::Path;

/// One panel of the figure: a title, the iterate path, and optional overlay
/// markers for the composition subsequence.
#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub path: Vec<(f64, f64)>,
    pub overlay: Vec<(f64, f64)>,
}

/// Reads the `(x_1, x_2)` columns of a trace CSV. One-dimensional traces plot
/// against zero.
pub fn read_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_points(&text, &path.display().to_string())
}

/// Parses trace CSV text; `origin` names the source in error messages.
pub fn parse_points(text: &str, origin: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(CliError::Config(format!("{origin}: empty trace file")));
    };
    let fields: Vec<&str> = header.split(',').collect();
    if fields.len() < 5
        || fields[0] != "step"
        || fields[1] != "chosen_index"
        || fields[2] != "lambda"
        || fields[3] != "x_1"
    {
        return Err(CliError::Config(format!(
            "{origin} line 1: not a trace header (expected step,chosen_index,lambda,x_1,...)"
        )));
    }
    let n_fields = fields.len();
    let has_x2 = fields[4] == "x_2";
    let mut points = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != n_fields {
            return Err(CliError::Config(format!(
                "{origin} line {line_no}: expected {n_fields} fields, found {}",
                cols.len()
            )));
        }
        let x1 = parse_field(cols[3], origin, line_no)?;
        let x2 = if has_x2 { parse_field(cols[4], origin, line_no)? } else { 0.0 };
        points.push((x1, x2));
    }
    if points.is_empty() {
        return Err(CliError::Config(format!("{origin}: no data rows")));
    }
    Ok(points)
}

fn parse_field(tok: &str, origin: &str, line_no: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| {
        CliError::Config(format!("{origin} line {line_no}: '{tok}' is not a number"))
    })?;
    if !v.is_finite() {
        return Err(CliError::Anomaly(format!(
            "{origin} line {line_no}: non-finite coordinate {tok}"
        )));
    }
    Ok(v)
}

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 250.0;
const TITLE_H: f64 = 18.0;
const GAP: f64 = 24.0;
const MARGIN: f64 = 28.0;
const INSET: f64 = 12.0;

fn bounds(panel: &Panel) -> (f64, f64, f64, f64) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for &(x, y) in panel.path.iter().chain(&panel.overlay) {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let pad = |lo: f64, hi: f64| {
        let span = hi - lo;
        if span <= 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo - 0.06 * span, hi + 0.06 * span)
        }
    };
    let (xmin, xmax) = pad(xmin, xmax);
    let (ymin, ymax) = pad(ymin, ymax);
    (xmin, xmax, ymin, ymax)
}

/// Renders the panels as a standalone SVG document. Identical input panels
/// produce identical bytes: no timestamps, no randomness, fixed formatting.
pub fn render(panels: &[Panel]) -> String {
    let cols = if panels.len() > 1 { 2 } else { 1 };
    let rows = panels.len().div_ceil(cols.max(1)).max(1);
    let width = 2.0 * MARGIN + cols as f64 * PANEL_W + (cols as f64 - 1.0) * GAP;
    let height =
        2.0 * MARGIN + rows as f64 * (PANEL_H + TITLE_H) + (rows as f64 - 1.0) * GAP;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(out, "<rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"#ffffff\"/>");
    for (k, panel) in panels.iter().enumerate() {
        let col = (k % cols) as f64;
        let row = (k / cols) as f64;
        let ox = MARGIN + col * (PANEL_W + GAP);
        let oy = MARGIN + row * (PANEL_H + TITLE_H + GAP) + TITLE_H;
        let (xmin, xmax, ymin, ymax) = bounds(panel);
        let to_svg = |x: f64, y: f64| -> (f64, f64) {
            let sx = ox + INSET + (x - xmin) / (xmax - xmin) * (PANEL_W - 2.0 * INSET);
            let sy = oy + PANEL_H - INSET - (y - ymin) / (ymax - ymin) * (PANEL_H - 2.0 * INSET);
            (sx, sy)
        };
        let _ = writeln!(
            out,
            "<text x=\"{ox:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" \
             fill=\"#333333\">{}</text>",
            oy - 6.0,
            escape(&panel.title)
        );
        let _ = writeln!(
            out,
            "<rect x=\"{ox:.1}\" y=\"{oy:.1}\" width=\"{PANEL_W:.1}\" height=\"{PANEL_H:.1}\" \
             fill=\"none\" stroke=\"#999999\" stroke-width=\"0.8\"/>"
        );
        if !panel.path.is_empty() {
            let mut pts = String::new();
            for &(x, y) in &panel.path {
                let (sx, sy) = to_svg(x, y);
                let _ = write!(pts, "{sx:.2},{sy:.2} ");
            }
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" \
                 stroke-width=\"0.9\" stroke-opacity=\"0.85\"/>",
                pts.trim_end()
            );
            let (sx, sy) = to_svg(panel.path[0].0, panel.path[0].1);
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"5\" height=\"5\" fill=\"#111111\"/>",
                sx - 2.5,
                sy - 2.5
            );
        }
        for &(x, y) in &panel.overlay {
            let (sx, sy) = to_svg(x, y);
            let _ = writeln!(
                out,
                "<circle cx=\"{sx:.2}\" cy=\"{sy:.2}\" r=\"2.4\" fill=\"#d62728\" \
                 stroke=\"#ffffff\" stroke-width=\"0.5\"/>"
            );
        }
    }
    let _ = writeln!(out, "</svg>");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
