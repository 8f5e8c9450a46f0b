//! Minimal SVG 1.1 line charts.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineStyle {
    Solid,
    Dotted,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub style: LineStyle,
}

impl Series {
    pub fn new(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>, style: LineStyle) -> Self {
        Self { label: label.into(), xs, ys, style }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl Panel {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    pub fn with(mut self, series: Series) -> Self {
        self.series.push(series);
        self
    }
}

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 56.0;
const COLORS: &[&str] = &["#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#17202a"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        let pad = lo.abs().max(1.0) * 1e-3;
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn draw_panel(out: &mut String, panel: &Panel, x0: f64) {
    let (xl, xh) = bounds(panel.series.iter().flat_map(|s| s.xs.iter().copied()));
    let (yl, yh) = bounds(panel.series.iter().flat_map(|s| s.ys.iter().copied()));
    let (w, h) = (PANEL_W - 1.5 * MARGIN, PANEL_H - 2.0 * MARGIN);
    let (left, top) = (x0 + MARGIN, MARGIN);
    let px = |x: f64| left + (x - xl) / (xh - xl) * w;
    let py = |y: f64| top + h - (y - yl) / (yh - yl) * h;

    let _ = writeln!(out, r##"<rect x="{left:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#000"/>"##);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        left + w / 2.0,
        top - 16.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
        left + w / 2.0,
        top + h + 36.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        left - 44.0,
        top + h / 2.0,
        left - 44.0,
        top + h / 2.0,
        escape(&panel.y_label)
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (xl + f * (xh - xl), yl + f * (yh - yl));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="10">{:.3}</text>"#,
            px(xv),
            top + h + 16.0,
            xv
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{:.4}</text>"#,
            left - 4.0,
            py(yv) + 3.0,
            yv
        );
    }
    for (k, s) in panel.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let dash = match s.style {
            LineStyle::Solid => "",
            LineStyle::Dotted => r#" stroke-dasharray="2,3""#,
        };
        let points: Vec<String> = s
            .xs
            .iter()
            .zip(&s.ys)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.4"{dash} points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 14.0 + 14.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.4"{dash}/>"#,
            left + w - 110.0,
            left + w - 92.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10">{}</text>"#,
            left + w - 88.0,
            ly + 3.0,
            escape(&s.label)
        );
    }
}

/// Panels laid out side by side.
pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{PANEL_H:.0}" viewBox="0 0 {width:.0} {PANEL_H:.0}">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    for (k, p) in panels.iter().enumerate() {
        draw_panel(&mut out, p, PANEL_W * k as f64);
    }
    out.push_str("</svg>\n");
    out
}
