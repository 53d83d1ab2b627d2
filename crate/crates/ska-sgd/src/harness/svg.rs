//! Static SVG line plots: linear x (iteration), log₁₀ y, one polyline per
//! series, a filled ±1-std band per series, axis ticks at decades, and a
//! text legend. No interactivity, no external assets.

use std::fmt::Write as _;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 420.0;
pub const MARGIN_LEFT: f64 = 70.0;
pub const MARGIN_RIGHT: f64 = 150.0;
pub const MARGIN_TOP: f64 = 30.0;
pub const MARGIN_BOTTOM: f64 = 50.0;

const COLORS: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
];

/// One plotted series: label plus (iter, mean, std) checkpoints.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64, f64)>,
}

/// Map a positive value onto a log-scaled pixel row: `lo` maps to
/// `bottom`, `hi` maps to `top`, decades in between are equally spaced.
pub fn log_y_pixel(value: f64, lo: f64, hi: f64, top: f64, bottom: f64) -> f64 {
    let t = (value.log10() - lo.log10()) / (hi.log10() - lo.log10());
    bottom + (top - bottom) * t
}

fn x_pixel(iter: f64, lo: f64, hi: f64) -> f64 {
    let span = (hi - lo).max(1.0);
    MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) * (iter - lo) / span
}

fn fmt_px(v: f64) -> String {
    format!("{:.2}", v)
}

/// Render the plot. Values ≤ 0 are clamped to half the smallest positive
/// value so the log axis stays defined.
pub fn render(title: &str, y_label: &str, series: &[Series]) -> String {
    assert!(!series.is_empty(), "nothing to plot");
    let mut min_pos = f64::INFINITY;
    let mut max_val: f64 = 0.0;
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    for s in series {
        for &(x, mean, std) in &s.points {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            for v in [mean - std, mean, mean + std] {
                if v > 0.0 {
                    min_pos = min_pos.min(v);
                    max_val = max_val.max(v);
                }
            }
        }
    }
    if !min_pos.is_finite() || max_val <= 0.0 {
        min_pos = 1e-1;
        max_val = 1.0;
    }
    if min_pos == max_val {
        min_pos /= 10.0;
    }
    let floor = min_pos * 0.5;
    let (y_lo, y_hi) = (floor, max_val * 1.5);
    let (top, bottom) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
    let clamp = |v: f64| if v > floor { v } else { floor };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
        MARGIN_LEFT,
        xml_escape(title)
    );
    // axes
    let _ = writeln!(
        svg,
        "  <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>",
        l = MARGIN_LEFT,
        t = top,
        b = bottom
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>",
        l = MARGIN_LEFT,
        b = bottom,
        r = WIDTH - MARGIN_RIGHT
    );
    // y ticks at decades
    let mut dec = y_lo.log10().ceil() as i32;
    while (10f64).powi(dec) <= y_hi {
        let v = (10f64).powi(dec);
        let y = log_y_pixel(v, y_lo, y_hi, top, bottom);
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{y:.2}\" x2=\"{}\" y2=\"{y:.2}\" stroke=\"#cccccc\"/>",
            MARGIN_LEFT,
            WIDTH - MARGIN_RIGHT
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{}</text>",
            MARGIN_LEFT - 6.0,
            y + 4.0,
            dec
        );
        dec += 1;
    }
    // x ticks: five evenly spaced
    for k in 0..=4 {
        let xv = x_lo + (x_hi - x_lo) * k as f64 / 4.0;
        let x = x_pixel(xv, x_lo, x_hi);
        let _ = writeln!(
            svg,
            "  <text x=\"{x:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            bottom + 18.0,
            xv.round()
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {mid})\">{}</text>",
        16.0,
        (top + bottom) / 2.0,
        xml_escape(y_label),
        mid = (top + bottom) / 2.0
    );

    for (idx, s) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        // ±1 std band as one closed polygon: upper edge then reversed lower
        let mut band = String::new();
        for &(x, mean, std) in &s.points {
            let _ = write!(
                band,
                "{},{} ",
                fmt_px(x_pixel(x, x_lo, x_hi)),
                fmt_px(log_y_pixel(clamp(mean + std), y_lo, y_hi, top, bottom))
            );
        }
        for &(x, mean, std) in s.points.iter().rev() {
            let _ = write!(
                band,
                "{},{} ",
                fmt_px(x_pixel(x, x_lo, x_hi)),
                fmt_px(log_y_pixel(clamp(mean - std), y_lo, y_hi, top, bottom))
            );
        }
        let _ = writeln!(
            svg,
            "  <polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.15\" stroke=\"none\"/>",
            band.trim_end()
        );
        let mut line = String::new();
        for &(x, mean, _) in &s.points {
            let _ = write!(
                line,
                "{},{} ",
                fmt_px(x_pixel(x, x_lo, x_hi)),
                fmt_px(log_y_pixel(clamp(mean), y_lo, y_hi, top, bottom))
            );
        }
        let _ = writeln!(
            svg,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            line.trim_end()
        );
        // legend
        let ly = MARGIN_TOP + 16.0 * idx as f64 + 10.0;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            svg,
            "  <line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            lx + 18.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            lx + 24.0,
            ly + 4.0,
            xml_escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Whitespace-separated data sidecar: `iter`, then `mean std` per series.
pub fn render_dat(series: &[Series]) -> String {
    let mut out = String::from("# iter");
    for s in series {
        let tag = s.label.replace(' ', "_");
        let _ = write!(out, " {tag}_mean {tag}_std");
    }
    out.push('\n');
    let n = series.iter().map(|s| s.points.len()).max().unwrap_or(0);
    for i in 0..n {
        let iter = series
            .iter()
            .find_map(|s| s.points.get(i).map(|p| p.0))
            .unwrap_or(0.0);
        let _ = write!(out, "{}", iter);
        for s in series {
            match s.points.get(i) {
                Some(&(_, mean, std)) => {
                    let _ = write!(out, " {} {}", mean, std);
                }
                None => out.push_str(" nan nan"),
            }
        }
        out.push('\n');
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polygon_points(svg: &str) -> Vec<(f64, f64)> {
        let start = svg.find("<polygon points=\"").unwrap() + "<polygon points=\"".len();
        let end = svg[start..].find('"').unwrap() + start;
        svg[start..end]
            .split_whitespace()
            .map(|pair| {
                let mut it = pair.split(',');
                (
                    it.next().unwrap().parse().unwrap(),
                    it.next().unwrap().parse().unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn single_series_two_points_has_one_polyline() {
        let s = Series {
            label: "sgd".into(),
            points: vec![(0.0, 1.0, 0.1), (10.0, 0.5, 0.05)],
        };
        let svg = render("t", "loss", &[s]);
        assert_eq!(svg.matches("<polyline").count(), 1);
        let line_start = svg.find("<polyline points=\"").unwrap() + "<polyline points=\"".len();
        let line_end = svg[line_start..].find('"').unwrap() + line_start;
        let pairs = svg[line_start..line_end].split_whitespace().count();
        assert_eq!(pairs, 2);
    }

    #[test]
    fn zero_std_band_has_zero_area() {
        let s = Series {
            label: "sgd".into(),
            points: vec![(0.0, 1.0, 0.0), (5.0, 0.5, 0.0), (10.0, 0.25, 0.0)],
        };
        let svg = render("t", "loss", &[s]);
        let pts = polygon_points(&svg);
        // shoelace
        let mut area = 0.0;
        for i in 0..pts.len() {
            let (x0, y0) = pts[i];
            let (x1, y1) = pts[(i + 1) % pts.len()];
            area += x0 * y1 - x1 * y0;
        }
        assert!(area.abs() < 1e-9, "area {area}");
    }

    #[test]
    fn log_axis_puts_mid_decade_in_the_middle() {
        let top = 30.0;
        let bottom = 370.0;
        let y1 = log_y_pixel(1e-1, 1e-3, 1e-1, top, bottom);
        let y2 = log_y_pixel(1e-2, 1e-3, 1e-1, top, bottom);
        let y3 = log_y_pixel(1e-3, 1e-3, 1e-1, top, bottom);
        assert!((y2 - 0.5 * (y1 + y3)).abs() < 1e-9, "{y1} {y2} {y3}");
    }

    #[test]
    fn dat_sidecar_layout() {
        let a = Series {
            label: "sgd".into(),
            points: vec![(10.0, 1.0, 0.5), (20.0, 0.5, 0.25)],
        };
        let b = Series {
            label: "ska ultimate".into(),
            points: vec![(10.0, 0.9, 0.1), (20.0, 0.3, 0.1)],
        };
        let dat = render_dat(&[a, b]);
        let mut lines = dat.lines();
        assert_eq!(
            lines.next().unwrap(),
            "# iter sgd_mean sgd_std ska_ultimate_mean ska_ultimate_std"
        );
        assert_eq!(lines.next().unwrap(), "10 1 0.5 0.9 0.1");
        assert_eq!(lines.next().unwrap(), "20 0.5 0.25 0.3 0.1");
    }
}
