//! Minimal SVG rendering for line plots and heat maps with contours.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 30.0;
const MB: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555"];

pub enum Style {
    Line,
    Markers,
}

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub style: Style,
}

pub struct LinePlot<'a> {
    pub title: &'a str,
    pub xlabel: &'a str,
    pub ylabel: &'a str,
    pub series: Vec<Series<'a>>,
    /// Dotted vertical markers.
    pub vlines: Vec<f64>,
}

fn finite_range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5 * lo.abs().max(1.0), hi + 0.5 * hi.abs().max(1.0))
    }
}

pub fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

pub fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        ML + (x - self.x0) / (self.x1 - self.x0) * (W - ML - MR)
    }
    fn py(&self, y: f64) -> f64 {
        H - MB - (y - self.y0) / (self.y1 - self.y0) * (H - MT - MB)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<rect x="{ML}" y="{MT}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - ML - MR,
        H - MT - MB
    );
    for t in ticks(f.x0, f.x1) {
        let x = f.px(t);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, H - MB, H - MB + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, H - MB + 18.0, fmt_tick(t));
    }
    for t in ticks(f.y0, f.y1) {
        let y = f.py(t);
        let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{ML}" y2="{y:.2}" stroke="black"/>"#, ML - 5.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, ML - 8.0, y + 4.0, fmt_tick(t));
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (ML + W - MR) / 2.0, H - 10.0, escape(xlabel));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (MT + H - MB) / 2.0,
        escape(ylabel)
    );
}

impl LinePlot<'_> {
    pub fn render(&self) -> String {
        let (x0, x1) = finite_range(self.series.iter().flat_map(|s| s.x.iter().cloned()).chain(self.vlines.iter().cloned()));
        let (y0, y1) = finite_range(self.series.iter().flat_map(|s| s.y.iter().cloned()));
        let pad = 0.05 * (y1 - y0);
        let f = Frame { x0, x1, y0: y0 - pad, y1: y1 + pad };
        let mut out = String::new();
        header(&mut out, self.title);
        axes(&mut out, &f, self.xlabel, self.ylabel);
        for v in &self.vlines {
            let x = f.px(*v);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{MT}" x2="{x:.2}" y2="{}" stroke="gray" stroke-dasharray="2,3"/>"#,
                H - MB
            );
        }
        for (k, s) in self.series.iter().enumerate() {
            let c = COLORS[k % COLORS.len()];
            let pts: Vec<(f64, f64)> =
                s.x.iter().zip(s.y).filter(|(x, y)| x.is_finite() && y.is_finite()).map(|(x, y)| (f.px(*x), f.py(*y))).collect();
            match s.style {
                Style::Line => {
                    let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    let _ = writeln!(out, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, d.join(" "));
                }
                Style::Markers => {
                    for (x, y) in pts {
                        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{c}"/>"#);
                    }
                }
            }
            let ly = MT + 16.0 + 16.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{ly}" text-anchor="end" fill="{c}">{}</text>"#,
                W - MR - 8.0,
                escape(s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

pub struct HeatMap<'a> {
    pub title: &'a str,
    pub xlabel: &'a str,
    pub ylabel: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    /// `values[i][j]` at (`x[i]`, `y[j]`).
    pub values: &'a [Vec<f64>],
    /// Field the contours are traced on; `values` when `None`.
    pub contour_field: Option<&'a [Vec<f64>]>,
    /// (level, label) pairs drawn as contour lines.
    pub contours: Vec<(f64, String)>,
}

fn shade(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let r = (255.0 * t.sqrt()) as u8;
    let g = (255.0 * t * t) as u8;
    let b = (255.0 * (1.0 - t) * 0.6 + 40.0 * t) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Line segments of the `level` set by marching squares, in data coordinates.
pub fn contour_segments(x: &[f64], y: &[f64], v: &[Vec<f64>], level: f64) -> Vec<[(f64, f64); 2]> {
    let mut segs = Vec::new();
    let lerp = |a: f64, b: f64, fa: f64, fb: f64| a + (level - fa) / (fb - fa) * (b - a);
    for i in 0..x.len().saturating_sub(1) {
        for j in 0..y.len().saturating_sub(1) {
            let c = [v[i][j], v[i + 1][j], v[i + 1][j + 1], v[i][j + 1]];
            if c.iter().any(|f| !f.is_finite()) {
                continue;
            }
            let p = [(x[i], y[j]), (x[i + 1], y[j]), (x[i + 1], y[j + 1]), (x[i], y[j + 1])];
            let mut cross = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                if (c[a] < level) != (c[b] < level) {
                    let pt = if p[a].0 == p[b].0 {
                        (p[a].0, lerp(p[a].1, p[b].1, c[a], c[b]))
                    } else {
                        (lerp(p[a].0, p[b].0, c[a], c[b]), p[a].1)
                    };
                    cross.push(pt);
                }
            }
            match cross.len() {
                2 => segs.push([cross[0], cross[1]]),
                4 => {
                    segs.push([cross[0], cross[1]]);
                    segs.push([cross[2], cross[3]]);
                }
                _ => {}
            }
        }
    }
    segs
}

impl HeatMap<'_> {
    pub fn render(&self) -> String {
        let (x0, x1) = finite_range(self.x.iter().cloned());
        let (y0, y1) = finite_range(self.y.iter().cloned());
        let (v0, v1) = finite_range(self.values.iter().flatten().cloned());
        let f = Frame { x0, x1, y0, y1 };
        let mut out = String::new();
        header(&mut out, self.title);
        let nx = self.x.len();
        let ny = self.y.len();
        let cw = (W - ML - MR) / nx as f64;
        let ch = (H - MT - MB) / ny as f64;
        for i in 0..nx {
            for j in 0..ny {
                let v = self.values[i][j];
                let fill = if v.is_finite() { shade((v - v0) / (v1 - v0)) } else { "#ffffff".into() };
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                    ML + i as f64 * cw,
                    H - MB - (j + 1) as f64 * ch,
                    cw + 0.3,
                    ch + 0.3
                );
            }
        }
        for (level, label) in &self.contours {
            let segs = contour_segments(self.x, self.y, self.contour_field.unwrap_or(self.values), *level);
            for s in &segs {
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="white" stroke-width="1"/>"#,
                    f.px(s[0].0),
                    f.py(s[0].1),
                    f.px(s[1].0),
                    f.py(s[1].1)
                );
            }
            if let Some(s) = segs.get(segs.len() / 2) {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" fill="white" font-size="10">{}</text>"#,
                    f.px(s[0].0) + 2.0,
                    f.py(s[0].1) - 2.0,
                    escape(label)
                );
            }
        }
        axes(&mut out, &f, self.xlabel, self.ylabel);
        out.push_str("</svg>\n");
        out
    }
}
