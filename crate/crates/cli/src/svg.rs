use std::fmt::Write;

use wfr::{Dataset, Labels, OUTLIER};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#bcbd22",
    "#17becf", "#7f7f7f",
];

/// Scatter of the first two coordinates (one-dimensional data is drawn on a
/// line). Families are colored dots; outliers are black crosses.
pub fn scatter(data: &Dataset, labels: &Labels) -> String {
    let xy: Vec<(f64, f64)> = data
        .rows()
        .map(|p| (p[0], p.get(1).copied().unwrap_or(0.0)))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &xy {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let scale = if span > 0.0 {
        (SIZE - 2.0 * MARGIN) / span
    } else {
        1.0
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (&(x, y), &l) in xy.iter().zip(labels.as_slice()) {
        let px = MARGIN + (x - x0) * scale;
        // svg y grows downward
        let py = SIZE - MARGIN - (y - y0) * scale;
        if l == OUTLIER {
            let _ = writeln!(
                out,
                r#"<path class="point outlier" d="M{:.2} {:.2}l6 6m0 -6l-6 6" stroke="black" stroke-width="1.5"/>"#,
                px - 3.0,
                py - 3.0
            );
        } else {
            let color = PALETTE[l as usize % PALETTE.len()];
            let _ = writeln!(
                out,
                r#"<circle class="point" data-label="{l}" cx="{px:.2}" cy="{py:.2}" r="3" fill="{color}"/>"#
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
