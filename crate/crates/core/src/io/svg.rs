//! Minimal SVG figures: matrix heatmaps and a step plot of `K`.

use std::fmt::Write as _;

const CELL_AREA: f64 = 480.0;
const MARGIN: f64 = 40.0;

fn open(width: f64, height: f64, title: &str) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        width / 2.0,
        escape(title)
    )
    .unwrap();
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Heatmap of `values` with rows and columns shown in `order`. Values are
/// mapped linearly from `[lo, hi]` to white through dark blue.
pub fn heatmap(values: &[Vec<f64>], order: &[usize], lo: f64, hi: f64, title: &str) -> String {
    let n = order.len();
    let size = CELL_AREA + 2.0 * MARGIN;
    let mut s = open(size, size, title);
    let cell = CELL_AREA / n.max(1) as f64;
    let span = if hi > lo { hi - lo } else { 1.0 };
    for (r, &i) in order.iter().enumerate() {
        for (c, &j) in order.iter().enumerate() {
            let t = ((values[i][j] - lo) / span).clamp(0.0, 1.0);
            let shade = |full: f64| (255.0 - t * (255.0 - full)).round() as u8;
            writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="rgb({},{},{})"/>"#,
                MARGIN + c as f64 * cell,
                MARGIN + r as f64 * cell,
                cell,
                cell,
                shade(8.0),
                shade(48.0),
                shade(107.0)
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Step plot of one or more `K` traces sharing the axes.
pub fn k_trace_plot(traces: &[Vec<usize>], title: &str) -> String {
    const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let (width, height) = (720.0, 320.0);
    let mut s = open(width, height, title);
    let len = traces.iter().map(Vec::len).max().unwrap_or(0).max(2);
    let k_max = traces.iter().flatten().copied().max().unwrap_or(1).max(1);
    let (x0, x1, y0, y1) = (MARGIN, width - MARGIN / 2.0, height - MARGIN, MARGIN);
    let x = |t: usize| x0 + (x1 - x0) * t as f64 / (len - 1) as f64;
    let y = |k: usize| y0 - (y0 - y1) * k as f64 / k_max as f64;
    writeln!(
        s,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" stroke="black" fill="none"/>"#
    )
    .unwrap();
    for k in 0..=k_max {
        writeln!(
            s,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{k}</text>"#,
            x0 - 4.0,
            y(k) + 3.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">iteration (1..{len})</text>"#,
        (x0 + x1) / 2.0,
        height - 10.0
    )
    .unwrap();
    for (c, trace) in traces.iter().enumerate() {
        let mut d = String::new();
        for (t, &k) in trace.iter().enumerate() {
            if t == 0 {
                write!(d, "M{:.2},{:.2}", x(t), y(k)).unwrap();
            } else {
                write!(d, " H{:.2} V{:.2}", x(t), y(k)).unwrap();
            }
        }
        writeln!(
            s,
            r#"<path d="{d}" stroke="{}" stroke-width="0.8" fill="none" opacity="0.8"/>"#,
            COLOURS[c % COLOURS.len()]
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
