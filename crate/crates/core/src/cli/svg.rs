//! Histogram of `A_μ(p)` over `[-3, 3]` as a static SVG.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::clausen::AValue;
use crate::error::{Error, Result};
use crate::measures::{density_f, Density};

#[derive(Debug, Clone, Copy)]
pub struct HistogramSpec {
    pub p: u64,
    pub bins: usize,
    pub overlay: bool,
}

/// Bin counts over `[-3, 3]` with boundaries `6k/bins - 3`; the last bin
/// is closed on the right.
pub fn bin_counts(values: &[AValue], spec: &HistogramSpec) -> Result<Vec<u64>> {
    if spec.bins == 0 {
        return Err(Error::Argument("bins must be positive".into()));
    }
    let bins = spec.bins as i128;
    let p = spec.p as i128;
    let mut counts = vec![0u64; spec.bins];
    for v in values {
        let shifted = v.num as i128 + 3 * p;
        if shifted < 0 || shifted > 6 * p {
            return Err(Error::Argument(format!(
                "A_{}({}) = {}/{} lies outside [-3, 3] (Hasse bound violated)",
                v.mu, v.p, v.num, v.p
            )));
        }
        let k = (shifted * bins / (6 * p)).min(bins - 1);
        counts[k as usize] += 1;
    }
    Ok(counts)
}

/// Bar heights `count / (p · width)`, comparable with `f(t)/4π`.
pub fn bar_heights(counts: &[u64], spec: &HistogramSpec) -> Vec<f64> {
    let width = 6.0 / spec.bins as f64;
    counts.iter().map(|&c| c as f64 / (spec.p as f64 * width)).collect()
}

const W: f64 = 800.0;
const H: f64 = 420.0;
const MARGIN: f64 = 40.0;

pub fn render(values: &[AValue], spec: &HistogramSpec) -> Result<String> {
    let heights = bar_heights(&bin_counts(values, spec)?, spec);
    let y_max = heights.iter().copied().fold(0.5, f64::max) * 1.1;
    let plot_w = W - 2.0 * MARGIN;
    let plot_h = H - 2.0 * MARGIN;
    let sx = |t: f64| MARGIN + (t + 3.0) / 6.0 * plot_w;
    let sy = |y: f64| H - MARGIN - (y / y_max).min(1.0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">A-values, p = {}, {} bins</text>"#,
        W / 2.0,
        spec.p,
        spec.bins
    );
    let bw = plot_w / spec.bins as f64;
    for (k, h) in heights.iter().enumerate() {
        let x = MARGIN + k as f64 * bw;
        let y = sy(*h);
        let _ = writeln!(
            svg,
            r##"<rect x="{x:.3}" y="{y:.3}" width="{bw:.3}" height="{:.3}" fill="#7a9cc6" stroke="#33507a" stroke-width="0.5"/>"##,
            H - MARGIN - y
        );
    }
    if spec.overlay {
        // One polyline per smooth piece; the poles at ±1 split the curve.
        let samples = 600;
        let mut piece = Vec::new();
        let mut pieces = Vec::new();
        for i in 0..=samples {
            let t = -3.0 + 6.0 * i as f64 / samples as f64;
            match density_f(t) {
                Density::Finite(f) => piece.push(format!("{:.3},{:.3}", sx(t), sy(f / (4.0 * PI)))),
                Density::Infinite => pieces.push(std::mem::take(&mut piece)),
            }
        }
        pieces.push(piece);
        for pts in pieces.into_iter().filter(|p| p.len() > 1) {
            let _ = writeln!(
                svg,
                r##"<polyline fill="none" stroke="#c0392b" stroke-width="1.5" points="{}"/>"##,
                pts.join(" ")
            );
        }
    }
    let base = H - MARGIN;
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{base}" x2="{:.1}" y2="{base}" stroke="black"/>"#,
        W - MARGIN
    );
    for t in -3..=3 {
        let x = sx(t as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{t}</text>"#,
            base + 16.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
