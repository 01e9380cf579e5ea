//! CSV, JSON and SVG serialization of Murphy and difference curves.
//!
//! CSV: a single Murphy curve has header `v,mean_score,variance`, a single
//! difference curve `v,mean_diff,ci_lower,ci_upper`. Overlays of several
//! curves on a shared grid use one `v` column followed by the per-curve
//! columns suffixed with `_<label>`.

use std::fmt::Write as _;

use serde::Serialize;

use super::{DiffCurve, MurphyCurve};
use crate::error::{Error, Result};
use crate::scores::{GridKind, ThresholdGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveFormat {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for CurveFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(CurveFormat::Csv),
            "json" => Ok(CurveFormat::Json),
            "svg" => Ok(CurveFormat::Svg),
            other => Err(Error::invalid(format!("unknown curve format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LabeledCurve {
    Murphy { label: String, curve: MurphyCurve },
    Diff { label: String, curve: DiffCurve },
}

impl LabeledCurve {
    pub fn murphy(label: impl Into<String>, curve: MurphyCurve) -> Self {
        LabeledCurve::Murphy { label: label.into(), curve }
    }

    pub fn diff(label: impl Into<String>, curve: DiffCurve) -> Self {
        LabeledCurve::Diff { label: label.into(), curve }
    }

    pub fn label(&self) -> &str {
        match self {
            LabeledCurve::Murphy { label, .. } | LabeledCurve::Diff { label, .. } => label,
        }
    }

    fn grid(&self) -> &ThresholdGrid {
        match self {
            LabeledCurve::Murphy { curve, .. } => &curve.grid,
            LabeledCurve::Diff { curve, .. } => &curve.grid,
        }
    }

    fn is_diff(&self) -> bool {
        matches!(self, LabeledCurve::Diff { .. })
    }

    /// Named value columns, in output order.
    fn columns(&self) -> Vec<(&'static str, &[f64])> {
        match self {
            LabeledCurve::Murphy { curve, .. } => {
                vec![("mean_score", &curve.mean_scores[..]), ("variance", &curve.pointwise_variance[..])]
            }
            LabeledCurve::Diff { curve, .. } => vec![
                ("mean_diff", &curve.mean_diffs[..]),
                ("ci_lower", &curve.ci_lower[..]),
                ("ci_upper", &curve.ci_upper[..]),
            ],
        }
    }
}

/// Serializes curves that share one threshold grid.
pub fn emit_curve_data(curves: &[LabeledCurve], format: CurveFormat) -> Result<Vec<u8>> {
    let first = curves.first().ok_or_else(|| Error::invalid("no curves to emit"))?;
    if curves.iter().any(|c| c.grid() != first.grid()) {
        return Err(Error::invalid("overlaid curves must share one threshold grid"));
    }
    if curves.iter().any(|c| c.is_diff() != first.is_diff()) {
        return Err(Error::invalid("cannot overlay Murphy curves and difference curves"));
    }
    match format {
        CurveFormat::Csv => Ok(to_csv(curves)),
        CurveFormat::Json => Ok(serde_json::to_vec_pretty(curves)?),
        CurveFormat::Svg => Ok(to_svg(curves).into_bytes()),
    }
}

fn to_csv(curves: &[LabeledCurve]) -> Vec<u8> {
    let single = curves.len() == 1;
    let mut out = String::from("v");
    for c in curves {
        for (name, _) in c.columns() {
            if single {
                write!(out, ",{name}").unwrap();
            } else {
                write!(out, ",{name}_{}", csv_label(c.label())).unwrap();
            }
        }
    }
    out.push('\n');
    for (i, v) in curves[0].grid().values().iter().enumerate() {
        write!(out, "{v}").unwrap();
        for c in curves {
            for (_, values) in c.columns() {
                write!(out, ",{}", values[i]).unwrap();
            }
        }
        out.push('\n');
    }
    out.into_bytes()
}

fn csv_label(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 56.0;

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn to_svg(curves: &[LabeledCurve]) -> String {
    let grid = curves[0].grid().values();
    let diff = curves[0].is_diff();
    let (x_lo, x_hi) = (grid[0], grid[grid.len() - 1]);
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for c in curves {
        let cols = c.columns();
        let plotted: Vec<&[f64]> = if diff { cols.iter().map(|c| c.1).collect() } else { vec![cols[0].1] };
        for v in plotted.into_iter().flatten() {
            y_lo = y_lo.min(*v);
            y_hi = y_hi.max(*v);
        }
    }
    if diff {
        y_lo = y_lo.min(0.0);
        y_hi = y_hi.max(0.0);
    }
    if y_hi - y_lo < 1e-12 {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    let pad = 0.05 * (y_hi - y_lo);
    let (y_lo, y_hi) = (y_lo - pad, y_hi + pad);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * pw;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * ph;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();

    // Axes and ticks.
    writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#).unwrap();
    for t in nice_ticks(x_lo, x_hi) {
        let x = sx(t);
        writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            fmt_tick(t)
        )
        .unwrap();
    }
    for t in nice_ticks(y_lo, y_hi) {
        let y = sy(t);
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            fmt_tick(t)
        )
        .unwrap();
    }
    let kind = match curves[0].grid().kind() {
        GridKind::V1 => "v1",
        GridKind::V2 => "v2",
    };
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">threshold {kind}</text>"#, LEFT + pw / 2.0, HEIGHT - 12.0)
        .unwrap();
    let y_label = if diff { "mean score difference (A - B)" } else { "mean elementary score" };
    writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{y_label}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    )
    .unwrap();

    if diff {
        let y0 = sy(0.0);
        writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            LEFT + pw
        )
        .unwrap();
    }

    for (k, c) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let cols = c.columns();
        if diff {
            let (lower, upper) = (cols[1].1, cols[2].1);
            let mut pts: Vec<String> = grid.iter().zip(upper).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
            pts.extend(grid.iter().zip(lower).rev().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))));
            writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, pts.join(" ")).unwrap();
        }
        let pts: Vec<String> = grid.iter().zip(cols[0].1).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" ")).unwrap();
    }

    // Legend.
    for (k, c) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let y = TOP + 16.0 + 18.0 * k as f64;
        let x = LEFT + pw - 170.0;
        writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 24.0,
            x + 30.0,
            y + 4.0,
            xml_escape(c.label())
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(t: f64) -> String {
    let t = if t.abs() < 1e-12 { 0.0 } else { t };
    let s = format!("{t:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}
