//! Minimal SVG plots: scatter or polyline series on linear or log axes.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Linear,
    Log,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub line: bool,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub series: Vec<Series>,
}

fn tr(v: f64, axis: Axis) -> Option<f64> {
    match axis {
        Axis::Linear if v.is_finite() => Some(v),
        Axis::Log if v > 0.0 && v.is_finite() => Some(v.log10()),
        _ => None,
    }
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn tick(v: f64, axis: Axis) -> String {
    match axis {
        Axis::Linear => format!("{v:.3}"),
        Axis::Log => format!("1e{v:.1}"),
    }
}

impl Plot {
    pub fn render(&self) -> String {
        let pts: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter_map(|&(x, y)| Some((tr(x, self.x_axis)?, tr(y, self.y_axis)?)))
                    .collect()
            })
            .collect();
        let (x0, x1) = range(pts.iter().flatten().map(|p| p.0));
        let (y0, y1) = range(pts.iter().flatten().map(|p| p.1));
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, esc(&self.title));
        let _ = writeln!(
            out,
            r#"<path d="M{PAD},{PAD} L{PAD},{b} L{r},{b}" stroke="black" fill="none"/>"#,
            b = H - PAD,
            r = W - PAD
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = x0 + f * (x1 - x0);
            let yv = y0 + f * (y1 - y0);
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(xv), H - PAD + 16.0, tick(xv, self.x_axis));
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, PAD - 4.0, sy(yv) + 4.0, tick(yv, self.y_axis));
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, esc(&self.x_label));
        let _ = writeln!(
            out,
            r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            esc(&self.y_label)
        );
        for (k, (s, p)) in self.series.iter().zip(&pts).enumerate() {
            let c = COLORS[k % COLORS.len()];
            if s.line && p.len() > 1 {
                let d: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(out, r#"<polyline points="{}" stroke="{c}" fill="none"/>"#, d.join(" "));
            } else {
                for &(x, y) in p {
                    let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, sx(x), sy(y));
                }
            }
            let ly = PAD + 16.0 * k as f64;
            let _ = writeln!(out, r#"<text x="{}" y="{ly}" fill="{c}">{}</text>"#, W - PAD - 150.0, esc(&s.label));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_axes_drop_nonpositive() {
        let p = Plot {
            title: "a<b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            x_axis: Axis::Log,
            y_axis: Axis::Log,
            series: vec![Series { label: "s".into(), points: vec![(1.0, 1.0), (10.0, 0.0), (100.0, 5.0)], line: false }],
        };
        let svg = p.render();
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
