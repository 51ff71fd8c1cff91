//! Standalone SVG figures: bifurcation scatter, Lyapunov lines and phase
//! portraits.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 5;
/// Portrait polylines are thinned to at most this many vertices.
const MAX_VERTICES: usize = 20_000;
const LINE_COLOURS: [&str; 3] = ["#c0392b", "#2471a3", "#229954"];

/// Affine map from data coordinates to the plot area. Increasing data maps
/// to increasing `x` pixels and decreasing `y` pixels.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    /// Frame covering every finite point, padded by 4% of each span.
    pub fn fit<I: IntoIterator<Item = (f64, f64)>>(points: I) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            if x.is_finite() && y.is_finite() {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        }
        Frame { x_range: padded(x0, x1), y_range: padded(y0, y1) }
    }

    /// Widens the vertical range to contain `y`.
    pub fn include_y(mut self, y: f64) -> Frame {
        self.y_range = (self.y_range.0.min(y), self.y_range.1.max(y));
        self
    }

    pub fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (WIDTH - LEFT - RIGHT)
    }

    pub fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    if span <= 0.0 {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    (lo - 0.04 * span, hi + 0.04 * span)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(title: &str, frame: &Frame, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="28" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
    let (bx, by) = (LEFT, TOP);
    let (bw, bh) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let _ = writeln!(s, r#"<rect x="{bx}" y="{by}" width="{bw}" height="{bh}" fill="none" stroke="black"/>"#);
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let xv = frame.x_range.0 + f * (frame.x_range.1 - frame.x_range.0);
        let yv = frame.y_range.0 + f * (frame.y_range.1 - frame.y_range.0);
        let (px, py) = (frame.px(xv), frame.py(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{0}" x2="{px:.2}" y2="{1}" stroke="black"/><text x="{px:.2}" y="{2}" text-anchor="middle">{xv:.3}</text>"#,
            HEIGHT - BOTTOM,
            HEIGHT - BOTTOM + 5.0,
            HEIGHT - BOTTOM + 20.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{1}" y="{2:.2}" text-anchor="end">{yv:.3}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + bw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + bh / 2.0,
        escape(y_label)
    );
    s
}

fn polyline(s: &mut String, frame: &Frame, points: impl Iterator<Item = (f64, f64)>, colour: &str, class: &str) {
    let mut coords = String::new();
    for (x, y) in points.filter(|(x, y)| x.is_finite() && y.is_finite()) {
        let _ = write!(coords, "{:.2},{:.2} ", frame.px(x), frame.py(y));
    }
    let _ = writeln!(
        s,
        r#"<polyline class="{class}" points="{}" fill="none" stroke="{colour}" stroke-width="1"/>"#,
        coords.trim_end()
    );
}

/// Scatter of `(ε, extremum)` pairs, one circle per pair.
pub fn bifurcation(points: &[(f64, f64)], title: &str) -> String {
    let frame = Frame::fit(points.iter().copied());
    let mut s = open(title, &frame, "ε", "x extrema");
    for &(e, v) in points.iter().filter(|(e, v)| e.is_finite() && v.is_finite()) {
        let _ = writeln!(
            s,
            r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="1.2" fill="black"/>"#,
            frame.px(e),
            frame.py(v)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// The three exponents against ε as polylines, with a dashed zero line.
pub fn lyapunov(epsilons: &[f64], exponents: &[[f64; 3]], title: &str) -> String {
    let all = epsilons.iter().zip(exponents).flat_map(|(e, l)| l.iter().map(move |v| (*e, *v)));
    let frame = Frame::fit(all).include_y(0.0);
    let mut s = open(title, &frame, "ε", "Lyapunov exponents");
    let (x0, x1) = frame.x_range;
    let _ = writeln!(
        s,
        r##"<line class="zero" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#555" stroke-dasharray="4 3"/>"##,
        frame.px(x0),
        frame.py(0.0),
        frame.px(x1),
        frame.py(0.0)
    );
    for (i, colour) in LINE_COLOURS.iter().enumerate() {
        polyline(&mut s, &frame, epsilons.iter().zip(exponents).map(|(e, l)| (*e, l[i])), colour, "exponent");
    }
    s.push_str("</svg>\n");
    s
}

/// Two-dimensional projection of a trajectory as one polyline.
pub fn portrait(points: &[(f64, f64)], labels: (&str, &str), title: &str) -> String {
    let frame = Frame::fit(points.iter().copied());
    let mut s = open(title, &frame, labels.0, labels.1);
    let stride = points.len().div_ceil(MAX_VERTICES).max(1);
    polyline(&mut s, &frame, points.iter().copied().step_by(stride), "black", "orbit");
    s.push_str("</svg>\n");
    s
}
