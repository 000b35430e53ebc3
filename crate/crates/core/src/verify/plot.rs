//! Static SVG plot of normalized slack against `k`, one line per check name.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::VerificationReport;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Slack divided by `max(|lhs|, |rhs|, 1)`, so rows of different scale
/// share an axis. Values below zero are violations before tolerance.
pub fn slack_svg(report: &VerificationReport) -> String {
    let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for c in &report.checks {
        let scale = c.lhs.abs().max(c.rhs.abs()).max(1.0);
        let y = c.slack / scale;
        if y.is_finite() {
            series.entry(&c.name).or_default().push((c.k as f64, y));
        }
    }
    let points = series.values().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle">{}: relative slack by k ({})</text>"#,
        WIDTH / 2.0,
        escape(&report.command),
        if report.pass { "pass" } else { "FAIL" }
    );
    // Axes and the zero line.
    let _ = writeln!(
        svg,
        r#"<path d="M{m} {t} V{b} H{r}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{}" y1="{z}" x2="{}" y2="{z}" stroke="#999" stroke-dasharray="4 3"/>"##,
        MARGIN,
        WIDTH - MARGIN,
        z = sy(0.0)
    );
    for (value, anchor_y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{value:.3}</text>"#,
            MARGIN - 4.0,
            anchor_y + 4.0
        );
    }
    for value in [x0, x1] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{value}</text>"#,
            sx(value),
            HEIGHT - MARGIN + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">k</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 4.0,
            MARGIN + 14.0 * i as f64,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{InequalityCheck, Tolerance};
    use crate::verify::CheckRow;

    #[test]
    fn one_polyline_per_check_name() {
        let mut r = VerificationReport::new("demo <test>", 1, "exact");
        for k in 1..5 {
            r.push(CheckRow::from_check("a", &InequalityCheck::new(k, 1.0, 2.0, Tolerance::Absolute(0.0))));
            r.push(CheckRow::from_check("b", &InequalityCheck::new(k, 2.0, 2.0, Tolerance::Absolute(0.0))));
        }
        let svg = slack_svg(&r.finalize());
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("&lt;test&gt;"));
        assert!(slack_svg(&VerificationReport::new("empty", 1, "")).starts_with("<svg"));
    }
}
