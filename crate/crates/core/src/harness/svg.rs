//! Log-log scatter plots as plain SVG text.

use crate::fit::ExponentFit;
use std::fmt::Write as _;

const W: f64 = 480.0;
const H: f64 = 360.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 32.0;
const BOTTOM: f64 = 48.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// (log₂ x, log₂ y); non-finite points are skipped.
    pub points: Vec<(f64, f64)>,
    /// Slope of the reference line, drawn through the centroid.
    pub theory: Option<f64>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if lo > hi {
        return (0.0, 1.0);
    }
    let pad = if hi > lo { (hi - lo) * 0.05 } else { 1.0 };
    (lo - pad, hi + pad)
}

pub fn render(plot: &Plot) -> String {
    let pts: Vec<(f64, f64)> = plot.points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    let (x0, x1) = range(pts.iter().map(|p| p.0));
    let (y0, y1) = range(pts.iter().map(|p| p.1));
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let sy = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="monospace" font-size="11">"#
    );
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="area"><rect x="{LEFT}" y="{TOP}" width="{}" height="{}"/></clipPath></defs>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, W / 2.0, esc(&plot.title));
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 12.0,
        esc(&plot.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{0}" text-anchor="middle" transform="rotate(-90 14 {0})">{1}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        esc(&plot.y_label)
    );
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="{anchor}">{x:.3}</text>"#,
            sx(x),
            H - BOTTOM + 14.0
        );
    }
    for y in [y0, y1] {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{y:.3}</text>"#,
            LEFT - 4.0,
            sy(y) + 4.0
        );
    }

    let mut line = |class: &str, colour: &str, dash: &str, slope: f64, through: (f64, f64)| {
        let (ya, yb) = (through.1 + slope * (x0 - through.0), through.1 + slope * (x1 - through.0));
        let _ = writeln!(
            out,
            r#"<line class="{class}" data-slope="{slope}" data-x1="{x0}" data-y1="{ya}" data-x2="{x1}" data-y2="{yb}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{colour}"{dash} clip-path="url(#area)"/>"#,
            sx(x0),
            sy(ya),
            sx(x1),
            sy(yb)
        );
    };
    let distinct_x = pts.iter().any(|p| p.0 != pts[0].0);
    if distinct_x {
        if let Ok(f) = ExponentFit::from_logs(pts.clone()) {
            let mid = (x0 + x1) / 2.0;
            line("fit", "steelblue", "", f.slope, (mid, f.predict(mid)));
        }
    }
    if let (Some(theory), false) = (plot.theory, pts.is_empty()) {
        let k = pts.len() as f64;
        let c = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        line("theory", "firebrick", r#" stroke-dasharray="6 4""#, theory, c);
    }
    for &(x, y) in &pts {
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{:.3}" cy="{:.3}" r="3" fill="black"><title>{x}, {y}</title></circle>"#,
            sx(x),
            sy(y)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attr(svg: &str, class: &str, name: &str) -> Option<f64> {
        let line = svg.lines().find(|l| l.contains(&format!(r#"class="{class}""#)))?;
        let key = format!(r#" {name}=""#);
        let rest = &line[line.find(&key)? + key.len()..];
        rest[..rest.find('"')?].parse().ok()
    }

    #[test]
    fn single_point_is_scatter_only() {
        let svg = render(&Plot {
            title: "one".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            points: vec![(1.0, 2.0)],
            theory: None,
        });
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<line").count(), 0);
    }

    #[test]
    fn reference_line_has_the_theory_slope() {
        let svg = render(&Plot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            points: vec![(1.0, 1.0), (2.0, 3.0), (3.0, 4.0)],
            theory: Some(-0.75),
        });
        assert_eq!(attr(&svg, "theory", "data-slope"), Some(-0.75));
        let (x1, y1) = (attr(&svg, "theory", "data-x1").unwrap(), attr(&svg, "theory", "data-y1").unwrap());
        let (x2, y2) = (attr(&svg, "theory", "data-x2").unwrap(), attr(&svg, "theory", "data-y2").unwrap());
        assert!(((y2 - y1) / (x2 - x1) + 0.75).abs() < 1e-12);
        assert!((attr(&svg, "fit", "data-slope").unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn titles_are_escaped() {
        let svg = render(&Plot {
            title: "a<b & c".into(),
            x_label: String::new(),
            y_label: String::new(),
            points: vec![],
            theory: Some(1.0),
        });
        assert!(svg.contains("a&lt;b &amp; c") && !svg.contains("<line"));
    }
}
