//! Minimal SVG polyline plots with linear axes.

use crate::output::fmt_sig;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 55.0;

/// Render one or more named polylines into a standalone SVG document.
pub fn polyline_plot(title: &str, series: &[(&str, &[(f64, f64)])]) -> String {
    let points: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if points.is_empty() {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = (WIDTH - 2.0 * MARGIN) / (x1 - x0);
    let sy = (HEIGHT - 2.0 * MARGIN) / (y1 - y0);
    let map = |x: f64, y: f64| -> (f64, f64) {
        (MARGIN + (x - x0) * sx, HEIGHT - MARGIN - (y - y0) * sy)
    };

    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];
    let mut body = String::new();
    for (i, (name, pts)) in series.iter().enumerate() {
        let coords: Vec<String> = pts
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| {
                let (px, py) = map(x, y);
                format!("{:.2},{:.2}", px, py)
            })
            .collect();
        let color = colors[i % colors.len()];
        body.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        body.push_str(&format!(
            "  <text x=\"{:.0}\" y=\"{:.0}\" fill=\"{color}\" font-size=\"13\">{name}</text>\n",
            WIDTH - MARGIN - 120.0,
            MARGIN + 18.0 * (i as f64 + 1.0)
        ));
    }

    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "  <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "  <text x=\"{tx:.0}\" y=\"25\" font-size=\"15\" text-anchor=\"middle\">{title}</text>\n",
            "  <line x1=\"{m}\" y1=\"{ybase}\" x2=\"{xend}\" y2=\"{ybase}\" stroke=\"black\"/>\n",
            "  <line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{ybase}\" stroke=\"black\"/>\n",
            "  <text x=\"{m}\" y=\"{lbl_y:.0}\" font-size=\"12\">{x0}</text>\n",
            "  <text x=\"{xend}\" y=\"{lbl_y:.0}\" font-size=\"12\" text-anchor=\"end\">{x1}</text>\n",
            "  <text x=\"6\" y=\"{ybase}\" font-size=\"12\">{y0}</text>\n",
            "  <text x=\"6\" y=\"{ytop:.0}\" font-size=\"12\">{y1}</text>\n",
            "{body}",
            "</svg>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        tx = WIDTH / 2.0,
        title = title,
        m = MARGIN,
        ybase = HEIGHT - MARGIN,
        xend = WIDTH - MARGIN,
        lbl_y = HEIGHT - MARGIN + 18.0,
        ytop = MARGIN + 4.0,
        x0 = fmt_sig(x0),
        x1 = fmt_sig(x1),
        y0 = fmt_sig(y0),
        y1 = fmt_sig(y1),
        body = body,
    )
}
