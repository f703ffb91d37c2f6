//! Self-contained SVG figures with a fixed 800×600 viewport.
//!
//! Output depends only on the input data, so identical inputs render to
//! identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::clustering::Dendrogram;
use crate::diffusion::EpsilonScan;
use crate::error::{Error, Result};
use crate::io::write_file;
use crate::preprocess::CorrelationMatrix;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 3] = ["#1f4e9c", "#c0392b", "#2e8b57"];

/// Point marker shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Cross,
    Circle,
    Square,
}

/// One labelled series of points.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub marker: Marker,
    pub points: Vec<(f64, f64)>,
    /// Optional text drawn next to each point.
    pub labels: Vec<String>,
}

/// Everything that can be drawn.
#[derive(Debug, Clone)]
pub enum Figure<'a> {
    /// Scatter of the first two diffusion coordinates with the zero
    /// threshold drawn as a vertical line.
    Embedding { series: &'a [Series], x_label: &'a str, y_label: &'a str },
    /// Weight sum against ε on log-log axes with the selected ε marked.
    EpsilonScan(&'a EpsilonScan),
    Dendrogram(&'a Dendrogram),
    /// Heatmap panels side by side; each panel carries the sample indices it
    /// covers.
    Correlation(&'a [(String, CorrelationMatrix, Vec<usize>)]),
    /// Overlay of several embeddings, already scaled.
    Comparison { series: &'a [Series], title: &'a str },
}

/// Renders a figure to SVG text.
pub fn render(figure: &Figure<'_>) -> Result<String> {
    match figure {
        Figure::Embedding { series, x_label, y_label } => {
            scatter(series, "Diffusion map embedding", x_label, y_label, true)
        }
        Figure::EpsilonScan(scan) => epsilon(scan),
        Figure::Dendrogram(tree) => dendrogram(tree),
        Figure::Correlation(panels) => heatmaps(panels),
        Figure::Comparison { series, title } => scatter(series, title, "component 1", "component 2", false),
    }
}

/// Renders and writes a figure.
pub fn emit_svg(path: &Path, figure: &Figure<'_>) -> Result<()> {
    write_file(path, render(figure)?.as_bytes())
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        Canvas { out }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, style: &str) {
        let _ = writeln!(
            self.out,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {style}/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, extra: &str, body: &str) {
        let _ = writeln!(
            self.out,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}"{extra}>{}</text>"#,
            escape(body)
        );
    }

    fn marker(&mut self, marker: Marker, x: f64, y: f64, color: &str) {
        let r = 5.0;
        match marker {
            Marker::Cross => {
                let style = format!(r#"stroke="{color}" stroke-width="2""#);
                self.line(x - r, y - r, x + r, y + r, &style);
                self.line(x - r, y + r, x + r, y - r, &style);
            }
            Marker::Circle => {
                let _ = writeln!(
                    self.out,
                    r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="none" stroke="{color}" stroke-width="2"/>"#
                );
            }
            Marker::Square => {
                let _ = writeln!(
                    self.out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                    x - r,
                    y - r,
                    2.0 * r,
                    2.0 * r
                );
            }
        }
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Linear map from a data range onto a pixel range.
#[derive(Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> Self {
        let (lo, hi) = if hi - lo > 0.0 {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        } else {
            let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
            (lo - pad, hi + pad)
        };
        Axis { lo, hi, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> (Vec<f64>, usize) {
        let raw = (self.hi - self.lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        let ticks = (first..=last)
            .map(|k| k as f64 * step)
            .map(|t| if t.abs() < step * 1e-9 { 0.0 } else { t })
            .collect();
        (ticks, decimals)
    }
}

fn frame(c: &mut Canvas, xa: &Axis, ya: &Axis, x_label: &str, y_label: &str, fmt: &dyn Fn(f64, usize) -> String) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let axis_style = r#"stroke="black" stroke-width="1""#;
    c.line(x0, y0, x1, y0, axis_style);
    c.line(x0, y0, x0, y1, axis_style);
    let (xt, xd) = xa.ticks();
    for t in xt {
        let px = xa.map(t);
        c.line(px, y0, px, y0 + 5.0, axis_style);
        c.text(px, y0 + 20.0, "middle", "", &fmt(t, xd));
    }
    let (yt, yd) = ya.ticks();
    for t in yt {
        let py = ya.map(t);
        c.line(x0 - 5.0, py, x0, py, axis_style);
        c.text(x0 - 8.0, py + 4.0, "end", "", &fmt(t, yd));
    }
    c.text((x0 + x1) / 2.0, HEIGHT - 15.0, "middle", "", x_label);
    let ym = (y0 + y1) / 2.0;
    c.text(
        20.0,
        ym,
        "middle",
        &format!(r#" transform="rotate(-90 20 {ym:.2})""#),
        y_label,
    );
}

fn plain(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}

fn scatter(series: &[Series], title: &str, x_label: &str, y_label: &str, threshold: bool) -> Result<String> {
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    if all.is_empty() {
        return Err(Error::invalid("scatter plot with no points"));
    }
    if all.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::invalid("scatter plot with non-finite coordinates"));
    }
    if series.iter().any(|s| !s.labels.is_empty() && s.labels.len() != s.points.len()) {
        return Err(Error::invalid("point labels do not match points"));
    }
    let (mut xmin, mut xmax) = extent(all.iter().map(|p| p.0));
    if threshold {
        xmin = xmin.min(0.0);
        xmax = xmax.max(0.0);
    }
    let (ymin, ymax) = extent(all.iter().map(|p| p.1));
    let xa = Axis::new(xmin, xmax, LEFT, WIDTH - RIGHT);
    let ya = Axis::new(ymin, ymax, HEIGHT - BOTTOM, TOP);

    let mut c = Canvas::new(title);
    frame(&mut c, &xa, &ya, x_label, y_label, &plain);
    if threshold {
        let px = xa.map(0.0);
        c.line(px, HEIGHT - BOTTOM, px, TOP, r#"stroke="gray" stroke-dasharray="6,4""#);
    }
    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        for (pi, &(x, y)) in s.points.iter().enumerate() {
            let (px, py) = (xa.map(x), ya.map(y));
            c.marker(s.marker, px, py, color);
            if let Some(label) = s.labels.get(pi) {
                c.text(px + 7.0, py - 7.0, "start", r#" font-size="10""#, label);
            }
        }
        let ly = TOP + 10.0 + 18.0 * si as f64;
        c.marker(s.marker, WIDTH - RIGHT - 120.0, ly, color);
        c.text(WIDTH - RIGHT - 108.0, ly + 4.0, "start", "", &s.name);
    }
    Ok(c.finish())
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn epsilon(scan: &EpsilonScan) -> Result<String> {
    if scan.grid.is_empty() || scan.grid.len() != scan.weight_sums.len() {
        return Err(Error::invalid("epsilon scan is empty"));
    }
    let xs: Vec<f64> = scan.grid.iter().map(|e| e.log10()).collect();
    let ys: Vec<f64> = scan.weight_sums.iter().map(|l| l.log10()).collect();
    let (xmin, xmax) = extent(xs.iter().copied());
    let (ymin, ymax) = extent(ys.iter().copied());
    let xa = Axis::new(xmin, xmax, LEFT, WIDTH - RIGHT);
    let ya = Axis::new(ymin, ymax, HEIGHT - BOTTOM, TOP);

    let mut c = Canvas::new("Weight sum L over kernel bandwidth");
    let pow10 = |v: f64, decimals: usize| format!("1e{v:.decimals$}");
    frame(&mut c, &xa, &ya, "epsilon", "L = sum of weights", &pow10);
    let path: Vec<String> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| format!("{:.2},{:.2}", xa.map(*x), ya.map(*y)))
        .collect();
    let _ = writeln!(
        c.out,
        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
        path.join(" "),
        PALETTE[0]
    );
    if let Some(sel) = scan.selected {
        let px = xa.map(sel.log10());
        c.line(px, HEIGHT - BOTTOM, px, TOP, r#"stroke="red" stroke-width="2""#);
        c.text(px + 5.0, TOP + 14.0, "start", r#" fill="red""#, &format!("epsilon = {sel:.4e}"));
    }
    Ok(c.finish())
}

fn dendrogram(tree: &Dendrogram) -> Result<String> {
    let n = tree.n;
    if n == 0 || tree.merges.len() + 1 != n {
        return Err(Error::invalid("dendrogram must have n - 1 merges"));
    }
    let order = tree.leaf_order();
    let mut xpos = vec![0.0; n + tree.merges.len()];
    let mut ypos = vec![0.0; n + tree.merges.len()];
    for (slot, &leaf) in order.iter().enumerate() {
        xpos[leaf] = slot as f64;
    }
    for m in &tree.merges {
        xpos[m.node] = 0.5 * (xpos[m.left] + xpos[m.right]);
        ypos[m.node] = m.height;
    }
    let top = tree.merges.last().map_or(0.0, |m| m.height);
    let xa = Axis::new(0.0, (n - 1) as f64, LEFT, WIDTH - RIGHT);
    let ya = Axis::new(0.0, top, HEIGHT - BOTTOM, TOP);

    let mut c = Canvas::new("Agglomerative clustering dendrogram");
    let (x0, y0) = (LEFT, HEIGHT - BOTTOM);
    let axis_style = r#"stroke="black" stroke-width="1""#;
    c.line(x0, y0, x0, TOP, axis_style);
    let (yt, yd) = ya.ticks();
    for t in yt.into_iter().filter(|t| *t >= 0.0) {
        let py = ya.map(t);
        c.line(x0 - 5.0, py, x0, py, axis_style);
        c.text(x0 - 8.0, py + 4.0, "end", "", &plain(t, yd));
    }
    let ym = (y0 + TOP) / 2.0;
    c.text(20.0, ym, "middle", &format!(r#" transform="rotate(-90 20 {ym:.2})""#), "merge height");
    let style = format!(r#"stroke="{}" stroke-width="1.5""#, PALETTE[0]);
    for m in &tree.merges {
        let (xl, xr) = (xa.map(xpos[m.left]), xa.map(xpos[m.right]));
        let yh = ya.map(m.height);
        c.line(xl, ya.map(ypos[m.left]), xl, yh, &style);
        c.line(xr, ya.map(ypos[m.right]), xr, yh, &style);
        c.line(xl, yh, xr, yh, &style);
    }
    for &leaf in &order {
        c.text(xa.map(xpos[leaf]), y0 + 18.0, "middle", r#" font-size="10""#, &(leaf + 1).to_string());
    }
    Ok(c.finish())
}

fn heatmaps(panels: &[(String, CorrelationMatrix, Vec<usize>)]) -> Result<String> {
    if panels.is_empty() {
        return Err(Error::invalid("no correlation panels"));
    }
    if panels.iter().any(|(_, m, idx)| m.order() != idx.len() || idx.is_empty()) {
        return Err(Error::invalid("correlation panel indices do not match matrix order"));
    }
    let gap = 30.0;
    let avail_w = (WIDTH - 2.0 * gap - gap * (panels.len() - 1) as f64) / panels.len() as f64;
    let side = avail_w.min(HEIGHT - TOP - BOTTOM - 20.0);
    let mut c = Canvas::new("Absolute correlation between samples");
    for (pi, (title, m, idx)) in panels.iter().enumerate() {
        let x0 = gap + pi as f64 * (side + gap);
        let y0 = TOP + 30.0;
        let k = idx.len();
        let cell = side / k as f64;
        c.text(x0 + side / 2.0, y0 - 10.0, "middle", "", title);
        for i in 0..k {
            for j in 0..k {
                let v = m.get(i, j).clamp(0.0, 1.0);
                let shade = |full: f64| (255.0 - v * (255.0 - full)).round() as u8;
                let _ = writeln!(
                    c.out,
                    r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#{:02x}{:02x}{:02x}"/>"##,
                    x0 + j as f64 * cell,
                    y0 + i as f64 * cell,
                    cell,
                    cell,
                    shade(31.0),
                    shade(78.0),
                    shade(156.0)
                );
            }
        }
        if cell >= 8.0 {
            let size = (cell * 0.7).min(10.0);
            for (t, &sample) in idx.iter().enumerate() {
                let label = (sample + 1).to_string();
                let font = format!(r#" font-size="{size:.1}""#);
                c.text(x0 + (t as f64 + 0.5) * cell, y0 + side + size + 2.0, "middle", &font, &label);
                c.text(x0 - 2.0, y0 + (t as f64 + 0.7) * cell, "end", &font, &label);
            }
        }
    }
    let ly = HEIGHT - 25.0;
    c.text(gap, ly, "start", "", "white = 0, dark blue = 1");
    Ok(c.finish())
}
