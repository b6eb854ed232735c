//! Self-contained SVG heatmaps with axes, a colour bar and overlay lines.
//!
//! Cells are quantised to a fixed diverging palette and each palette level
//! becomes one `<path>` of run-length encoded rectangles, which keeps a
//! 256×256 map well under a megabyte.

use std::fmt::Write;

use super::config::Conventions;

/// Diverging palette size (odd, so zero maps to the white centre).
pub const PALETTE_LEVELS: usize = 33;

const PLOT: f64 = 512.0;
const LEFT: f64 = 80.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const RIGHT: f64 = 110.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub label: String,
    /// (x, y) in data coordinates.
    pub points: Vec<(f64, f64)>,
}

/// Real values on a (y, x) grid; `values[j][i]` sits at (x[i], y[j]).
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub overlays: Vec<Polyline>,
}

fn palette(level: usize) -> (u8, u8, u8) {
    // blue (−1) → white (0) → red (+1)
    let t = level as f64 / (PALETTE_LEVELS - 1) as f64 * 2.0 - 1.0;
    let fade = |s: f64| (255.0 * (1.0 - s)).round() as u8;
    if t < 0.0 {
        (fade(-t), fade(-t * 0.6), 255)
    } else {
        (255, fade(t * 0.6), fade(t))
    }
}

fn quantize(v: f64, scale: f64) -> usize {
    let s = if scale > 0.0 && v.is_finite() { (v / scale).clamp(-1.0, 1.0) } else { 0.0 };
    (((s + 1.0) * 0.5 * (PALETTE_LEVELS - 1) as f64).round() as usize).min(PALETTE_LEVELS - 1)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Map from data coordinate to pixel along one axis, with cell centres at
/// the sample positions.
fn axis_map(values: &[f64], pixels: f64) -> impl Fn(f64) -> f64 + '_ {
    let n = values.len().max(1);
    let lo = values.first().copied().unwrap_or(0.0);
    let hi = values.last().copied().unwrap_or(1.0);
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 1.0 };
    let cell = pixels / n as f64;
    move |v| ((v - lo) / step + 0.5) * cell
}

pub fn render_heatmap(map: &Heatmap, conventions: &Conventions) -> String {
    let nx = map.x.len().max(1);
    let ny = map.y.len().max(1);
    let width = LEFT + PLOT + RIGHT;
    let height = TOP + PLOT + BOTTOM;
    let scale = map
        .values
        .iter()
        .flatten()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        "<desc>frequency={} conjugation={} jump_basis={} stat_dephasing={}</desc>",
        conventions.frequency.as_str(),
        conventions.conjugation.as_str(),
        conventions.jump_basis.as_str(),
        if conventions.stat_dephasing { "on" } else { "off" }
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + PLOT / 2.0,
        escape(&map.title)
    );
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}"/></clipPath></defs>"#
    );

    // cells in integer grid units, scaled into the plot box; y grows upward
    let mut paths: Vec<String> = vec![String::new(); PALETTE_LEVELS];
    for (j, row) in map.values.iter().enumerate() {
        let gy = ny - 1 - j;
        let mut i = 0;
        while i < row.len() {
            let level = quantize(row[i], scale);
            let mut end = i + 1;
            while end < row.len() && quantize(row[end], scale) == level {
                end += 1;
            }
            let _ = write!(paths[level], "M{i} {gy}h{}v1h-{}z", end - i, end - i);
            i = end;
        }
    }
    let _ = writeln!(
        s,
        r#"<g transform="translate({LEFT} {TOP}) scale({} {})" shape-rendering="crispEdges">"#,
        PLOT / nx as f64,
        PLOT / ny as f64
    );
    for (level, d) in paths.iter().enumerate() {
        if d.is_empty() {
            continue;
        }
        let (r, g, b) = palette(level);
        let _ = writeln!(s, r##"<path fill="#{r:02x}{g:02x}{b:02x}" d="{d}"/>"##);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );

    let px = axis_map(&map.x, PLOT);
    let py = axis_map(&map.y, PLOT);
    let colours = ["#000000", "#1b7f3a", "#7a3db8", "#c07000"];
    let _ = writeln!(s, r#"<g clip-path="url(#plot)" fill="none" stroke-width="1.5">"#);
    for (k, line) in map.overlays.iter().enumerate() {
        if line.points.is_empty() {
            continue;
        }
        let pts: Vec<String> = line
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", LEFT + px(x), TOP + PLOT - py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline stroke="{}" stroke-dasharray="6 4" points="{}"><title>{}</title></polyline>"#,
            colours[k % colours.len()],
            pts.join(" "),
            escape(&line.label)
        );
    }
    let _ = writeln!(s, "</g>");

    // ticks at five evenly spaced sample positions
    for t in 0..5 {
        if let Some(&x) = map.x.get(t * (nx - 1) / 4) {
            let x_px = LEFT + px(x);
            let _ = writeln!(
                s,
                r#"<line x1="{x_px:.2}" y1="{}" x2="{x_px:.2}" y2="{}" stroke="black"/><text x="{x_px:.2}" y="{}" text-anchor="middle">{x:.3}</text>"#,
                TOP + PLOT,
                TOP + PLOT + 5.0,
                TOP + PLOT + 20.0
            );
        }
        if let Some(&y) = map.y.get(t * (ny - 1) / 4) {
            let y_px = TOP + PLOT - py(y);
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{y_px:.2}" x2="{LEFT}" y2="{y_px:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{y:.3}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                y_px + 4.0
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + PLOT / 2.0,
        TOP + PLOT + 45.0,
        escape(&map.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(20 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + PLOT / 2.0,
        escape(&map.y_label)
    );

    // colour bar
    let bar_x = LEFT + PLOT + 25.0;
    let cell = PLOT / PALETTE_LEVELS as f64;
    for level in 0..PALETTE_LEVELS {
        let (r, g, b) = palette(level);
        let y = TOP + PLOT - (level + 1) as f64 * cell;
        let _ = writeln!(
            s,
            r##"<rect x="{bar_x}" y="{y:.2}" width="18" height="{:.2}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
            cell + 0.5
        );
    }
    for (frac, value) in [(0.0, -scale), (0.5, 0.0), (1.0, scale)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}">{value:.3}</text>"#,
            bar_x + 24.0,
            TOP + PLOT - frac * PLOT + 4.0
        );
    }
    s.push_str("</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(n: usize) -> Heatmap {
        let axis: Vec<f64> = (0..n).map(|k| -0.5 + k as f64 / (n - 1) as f64).collect();
        let values = (0..n)
            .map(|j| (0..n).map(|i| ((i * 7 + j * 13) % 101) as f64 / 50.0 - 1.0).collect())
            .collect();
        Heatmap {
            title: "test <map>".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            x: axis.clone(),
            y: axis,
            values,
            overlays: vec![Polyline { label: "diag".into(), points: vec![(-0.5, -0.5), (0.5, 0.5)] }],
        }
    }

    #[test]
    fn large_map_stays_small() {
        let svg = render_heatmap(&map(256), &Conventions::default());
        assert!(svg.len() < 2_000_000, "{} bytes", svg.len());
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>"));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("test &lt;map&gt;"));
        assert!(!svg.contains("href"));
    }

    #[test]
    fn palette_centre_is_white() {
        assert_eq!(palette(PALETTE_LEVELS / 2), (255, 255, 255));
        assert_eq!(quantize(0.0, 1.0), PALETTE_LEVELS / 2);
        assert_eq!(quantize(-5.0, 1.0), 0);
        assert_eq!(quantize(1.0, 1.0), PALETTE_LEVELS - 1);
        assert_eq!(quantize(0.3, 0.0), PALETTE_LEVELS / 2);
    }

    #[test]
    fn deterministic() {
        let a = render_heatmap(&map(20), &Conventions::default());
        let b = render_heatmap(&map(20), &Conventions::default());
        assert_eq!(a, b);
    }
}
