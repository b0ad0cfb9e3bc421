//! Minimal SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 40.0;

/// One polyline per series, each in its own colour, on shared axes.
pub fn polylines(series: &[Vec<(f64, f64)>], x_label: &str, y_label: &str) -> String {
    let finite = series.iter().flatten().filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let sx = if x1 > x0 { (W - 2.0 * PAD) / (x1 - x0) } else { 1.0 };
    let sy = if y1 > y0 { (H - 2.0 * PAD) / (y1 - y0) } else { 1.0 };
    let colours = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{x_label} [{x0:.4}, {x1:.4}]</text>"#, W / 2.0, H - 10.0);
    let _ = writeln!(s, r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})" text-anchor="middle">{y_label} [{y0:.4}, {y1:.4}]</text>"#, H / 2.0, H / 2.0);
    for (k, pts) in series.iter().enumerate() {
        let coords: Vec<String> = pts
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", PAD + (x - x0) * sx, H - PAD - (y - y0) * sy))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            coords.join(" "),
            colours[k % colours.len()]
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn save(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
