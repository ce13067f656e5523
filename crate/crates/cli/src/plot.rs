//! Minimal SVG line plots and heatmaps.
//!
//! Output depends only on the data, so reruns are byte-identical.

use std::fmt::Write;

use nalgebra::DMatrix;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub color: Option<&'static str>,
    pub width: f64,
    pub dashed: bool,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
            color: None,
            width: 1.5,
            dashed: false,
        }
    }

    pub fn styled(mut self, color: &'static str, width: f64, dashed: bool) -> Self {
        self.color = Some(color);
        self.width = width;
        self.dashed = dashed;
        self
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        width / 2.0,
        escape(title)
    );
}

/// Axis range widened to multiples of a 1-2-5 step, with the tick values.
fn nice_axis(values: impl Iterator<Item = f64>) -> (f64, f64, Vec<f64>) {
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let raw = (hi - lo) / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let (start, end) = ((lo / step).floor(), (hi / step).ceil());
    let ticks = (0..=(end - start) as usize).map(|k| (start + k as f64) * step).collect();
    (start * step, end * step, ticks)
}

fn tick_label(v: f64) -> String {
    let rounded = (v * 1e6).round() / 1e6;
    if rounded == 0.0 {
        "0".into()
    } else {
        rounded.to_string()
    }
}

/// Line plot with 1-2-5 ticks and a legend on the right.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x_lo, x_hi, x_ticks) = nice_axis(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y_lo, y_hi, y_ticks) = nice_axis(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    header(&mut out, WIDTH, HEIGHT, title);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for &x in &x_ticks {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(x),
            HEIGHT - MARGIN_BOTTOM + 16.0,
            tick_label(x)
        );
    }
    for &y in &y_ticks {
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN_LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            sy(y),
            MARGIN_LEFT + plot_w,
            sy(y)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 6.0,
            sy(y) + 4.0,
            tick_label(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = s.color.unwrap_or(PALETTE[i % PALETTE.len()]);
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let points: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="{}"{dash} points="{}"/>"#,
            s.width,
            points.join(" ")
        );
        let ly = MARGIN_TOP + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{color}" stroke-width="{}"{dash}/>"#,
            lx + 20.0,
            s.width.max(2.0)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Blue (negative) to white (zero) to red (positive), scaled by `max |m|`.
fn diverging(value: f64, scale: f64) -> String {
    let f = if scale > 0.0 { (value / scale).clamp(-1.0, 1.0) } else { 0.0 };
    let fade = |c: f64| (255.0 - (255.0 - c) * f.abs()).round() as u8;
    let (r, g, b) = if f >= 0.0 {
        (fade(178.0), fade(24.0), fade(43.0))
    } else {
        (fade(33.0), fade(102.0), fade(172.0))
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Heatmap of a matrix, row 1 at the top, with a symmetric color scale.
pub fn heatmap(title: &str, m: &DMatrix<f64>) -> String {
    let size = 400.0;
    let (rows, cols) = m.shape();
    let cell_w = size / cols.max(1) as f64;
    let cell_h = size / rows.max(1) as f64;
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let (left, top) = (40.0, 40.0);

    let mut out = String::new();
    header(&mut out, size + 160.0, size + 70.0, title);
    for i in 0..rows {
        for j in 0..cols {
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                left + j as f64 * cell_w,
                top + i as f64 * cell_h,
                cell_w + 0.05,
                cell_h + 0.05,
                diverging(m[(i, j)], scale)
            );
        }
    }
    let bar_x = left + size + 30.0;
    for k in 0..=20 {
        let v = scale * (1.0 - k as f64 / 10.0);
        let _ = writeln!(
            out,
            r#"<rect x="{bar_x}" y="{:.2}" width="20" height="20.05" fill="{}"/>"#,
            top + k as f64 * (size / 21.0),
            diverging(v, scale)
        );
    }
    for (k, v) in [(0.0, scale), (10.0, 0.0), (20.0, -scale)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}">{:.3}</text>"#,
            bar_x + 26.0,
            top + k * (size / 21.0) + 14.0,
            v
        );
    }
    out.push_str("</svg>\n");
    out
}
