//! Static SVG plots, hand-emitted so the output is renderer-independent,
//! dependency-free and byte-deterministic for a given input.

use std::fmt::Write;

use swapsim_core::{Histogram, LorenzPoint};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

struct Canvas {
    svg: String,
}

impl Canvas {
    fn new(title: &str, provenance: &str) -> Self {
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg version="1.1" width="{WIDTH}" height="{HEIGHT}" xmlns="http://www.w3.org/2000/svg">"#
        );
        let _ = writeln!(svg, "<!-- {} -->", provenance.replace("--", "-"));
        let _ = writeln!(
            svg,
            r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{title}</text>"#,
            WIDTH / 2.0
        );
        Canvas { svg }
    }

    /// Maps plot coordinates in [0,1]^2 to pixels (y grows upward).
    fn px(x: f64) -> f64 {
        MARGIN_LEFT + x * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - y * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn frame(&mut self, x_label: &str, y_label: &str) {
        let _ = writeln!(
            self.svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            Self::px(0.0),
            Self::py(1.0),
            Self::px(1.0) - Self::px(0.0),
            Self::py(0.0) - Self::py(1.0)
        );
        let _ = writeln!(
            self.svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13">{x_label}</text>"#,
            Self::px(0.5),
            HEIGHT - 12.0
        );
        let _ = writeln!(
            self.svg,
            r#"<text x="18" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {:.2})">{y_label}</text>"#,
            Self::py(0.5),
            Self::py(0.5)
        );
    }

    fn x_tick(&mut self, x: f64, label: &str) {
        let _ = writeln!(
            self.svg,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/>"#,
            Self::px(x),
            Self::py(0.0),
            Self::py(0.0) + 5.0
        );
        let _ = writeln!(
            self.svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{label}</text>"#,
            Self::px(x),
            Self::py(0.0) + 18.0
        );
    }

    fn y_tick(&mut self, y: f64, label: &str) {
        let _ = writeln!(
            self.svg,
            r#"<line x1="{1:.2}" y1="{0:.2}" x2="{2:.2}" y2="{0:.2}" stroke="black"/>"#,
            Self::py(y),
            Self::px(0.0) - 5.0,
            Self::px(0.0)
        );
        let _ = writeln!(
            self.svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{label}</text>"#,
            Self::px(0.0) - 8.0,
            Self::py(y) + 4.0
        );
    }

    fn annotation(&mut self, line: &str) {
        let _ = writeln!(
            self.svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="start" font-family="sans-serif" font-size="14">{line}</text>"#,
            Self::px(0.05),
            Self::py(0.92)
        );
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

/// Lorenz curve with the equality diagonal and a Gini annotation.
pub fn lorenz_svg(
    title: &str,
    points: &[LorenzPoint],
    gini: Option<f64>,
    provenance: &str,
) -> String {
    let mut canvas = Canvas::new(title, provenance);
    canvas.frame("population share", "value share");
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        canvas.x_tick(t, &format!("{t:.2}"));
        canvas.y_tick(t, &format!("{t:.2}"));
    }
    let _ = writeln!(
        canvas.svg,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
        Canvas::px(0.0),
        Canvas::py(0.0),
        Canvas::px(1.0),
        Canvas::py(1.0)
    );
    if !points.is_empty() {
        let mut path = String::new();
        for (i, p) in points.iter().enumerate() {
            let _ = write!(
                path,
                "{}{:.2} {:.2}",
                if i == 0 { "M" } else { " L" },
                Canvas::px(p.population_share),
                Canvas::py(p.value_share)
            );
        }
        let _ = writeln!(
            canvas.svg,
            r#"<path d="{path}" fill="none" stroke="steelblue" stroke-width="2"/>"#
        );
    }
    match gini {
        Some(g) => canvas.annotation(&format!("Gini = {g:.4}")),
        None => canvas.annotation("Gini undefined"),
    }
    canvas.finish()
}

/// Bar chart of the forwarded-chunk histogram.
pub fn histogram_svg(title: &str, histogram: &Histogram, provenance: &str) -> String {
    let mut canvas = Canvas::new(title, provenance);
    canvas.frame("forwarded chunks", "nodes");
    let max_count = histogram.bins.iter().map(|b| b.count).max().unwrap_or(0);
    let x_max = histogram.bins.len() as f64;
    let y_max = max_count.max(1) as f64;
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let chunks = (t * x_max * histogram.bin_width as f64).round() as u64;
        canvas.x_tick(t, &chunks.to_string());
        canvas.y_tick(t, &((t * y_max).round() as u64).to_string());
    }
    for (i, bin) in histogram.bins.iter().enumerate() {
        if bin.count == 0 {
            continue;
        }
        let x0 = Canvas::px(i as f64 / x_max);
        let x1 = Canvas::px((i + 1) as f64 / x_max);
        let y = Canvas::py(bin.count as f64 / y_max);
        let _ = writeln!(
            canvas.svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="steelblue" stroke="none"/>"#,
            x0,
            y,
            (x1 - x0).max(0.5),
            Canvas::py(0.0) - y
        );
    }
    canvas.annotation(&format!(
        "bin width {}; max count {max_count}",
        histogram.bin_width
    ));
    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use swapsim_core::HistogramBin;

    #[test]
    fn lorenz_svg_is_deterministic_and_annotated() {
        let points = vec![
            LorenzPoint {
                population_share: 0.0,
                value_share: 0.0,
            },
            LorenzPoint {
                population_share: 0.5,
                value_share: 0.2,
            },
            LorenzPoint {
                population_share: 1.0,
                value_share: 1.0,
            },
        ];
        let a = lorenz_svg("F2", &points, Some(0.3), "prov");
        let b = lorenz_svg("F2", &points, Some(0.3), "prov");
        assert_eq!(a, b);
        assert!(a.contains("Gini = 0.3000"));
        assert!(a.contains("</svg>"));
        let undefined = lorenz_svg("F2", &[], None, "prov");
        assert!(undefined.contains("Gini undefined"));
    }

    #[test]
    fn histogram_svg_draws_bars() {
        let hist = Histogram {
            bin_width: 10,
            bins: vec![
                HistogramBin { low: 0, count: 3 },
                HistogramBin { low: 10, count: 0 },
                HistogramBin { low: 20, count: 7 },
            ],
        };
        let svg = histogram_svg("forwarded", &hist, "prov");
        assert_eq!(svg.matches("<rect").count(), 2 + 2, "background, frame, two bars");
        assert!(svg.contains("max count 7"));
    }
}
