//! Minimal self-contained SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

#[derive(Default)]
pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub series: Vec<Series<'a>>,
    /// Dashed horizontal lines.
    pub guides: Vec<f64>,
    /// Dotted vertical lines.
    pub markers: Vec<f64>,
    /// Draw a dot at each sample.
    pub points: bool,
    /// Comment embedded in the file unless output must be reproducible.
    pub stamp: Option<String>,
}

impl Plot<'_> {
    pub fn render(&self) -> String {
        let xs = self.series.iter().flat_map(|s| s.x.iter()).chain(&self.markers);
        let (x0, x1) = padded_range(xs.copied(), 0.0);
        let ys = self.series.iter().flat_map(|s| s.y.iter()).chain(&self.guides);
        let (y0, y1) = padded_range(ys.copied(), 0.05);
        let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (WIDTH - LEFT - RIGHT);
        let py = |y: f64| HEIGHT - BOTTOM - (y - y0) / (y1 - y0) * (HEIGHT - TOP - BOTTOM);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        if let Some(stamp) = &self.stamp {
            let _ = writeln!(s, "<!-- {} -->", stamp.replace("--", "- -"));
        }
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(self.title)
        );
        let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
        let _ = writeln!(
            s,
            r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            r - l,
            b - t
        );
        for k in 0..=5 {
            let xv = x0 + (x1 - x0) * k as f64 / 5.0;
            let yv = y0 + (y1 - y0) * k as f64 / 5.0;
            let _ = writeln!(
                s,
                r#"<line x1="{0:.2}" y1="{b}" x2="{0:.2}" y2="{1}" stroke="black"/><text x="{0:.2}" y="{2}" text-anchor="middle">{3}</text>"#,
                px(xv),
                b + 5.0,
                b + 18.0,
                tick(xv)
            );
            let _ = writeln!(
                s,
                r#"<line x1="{l}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="black"/><text x="{2}" y="{3:.2}" text-anchor="end">{4}</text>"#,
                py(yv),
                l - 5.0,
                l - 8.0,
                py(yv) + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (l + r) / 2.0,
            HEIGHT - 12.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
            (t + b) / 2.0,
            escape(self.y_label)
        );
        for &g in &self.guides {
            let _ = writeln!(
                s,
                r##"<line x1="{l}" y1="{0:.2}" x2="{r}" y2="{0:.2}" stroke="#888" stroke-dasharray="6 4"/>"##,
                py(g)
            );
        }
        for &m in &self.markers {
            let _ = writeln!(
                s,
                r##"<line x1="{0:.2}" y1="{t}" x2="{0:.2}" y2="{b}" stroke="#888" stroke-dasharray="2 3"/>"##,
                px(m)
            );
        }
        for (k, series) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let path: Vec<String> = series
                .x
                .iter()
                .zip(series.y)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
            if self.points {
                for p in &path {
                    let (cx, cy) = p.split_once(',').expect("formatted pair");
                    let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
                }
            }
            let ly = t + 16.0 + 16.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{0}" y1="{ly}" x2="{1}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{2}" y="{3}">{4}</text>"#,
                r - 150.0,
                r - 125.0,
                r - 120.0,
                ly + 4.0,
                escape(series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn padded_range(values: impl Iterator<Item = f64>, pad: f64) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    let d = (hi - lo) * pad;
    (lo - d, hi + d)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series_guides_and_markers() {
        let x = [0.0, 1.0, 2.0];
        let y = [0.0, 1.0, -1.0];
        let svg = Plot {
            title: "a < b",
            series: vec![Series {
                label: "f",
                x: &x,
                y: &y,
            }],
            guides: vec![1.0, -1.0],
            markers: vec![1.0],
            ..Default::default()
        }
        .render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("stroke-dasharray=\"6 4\"").count(), 2);
        assert!(svg.contains("a &lt; b"));
        assert!(!svg.contains("<!--"));
    }

    #[test]
    fn degenerate_ranges_do_not_divide_by_zero() {
        let x = [1.0];
        let y = [2.0];
        let svg = Plot {
            series: vec![Series {
                label: "p",
                x: &x,
                y: &y,
            }],
            points: true,
            stamp: Some("t".into()),
            ..Default::default()
        }
        .render();
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
        assert!(svg.contains("<!-- t -->"));
    }
}
