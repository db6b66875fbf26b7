//! Coordinates and SVG output for the Goldbach Circle figure.
//!
//! The centre `C` sits at the origin with the diameter `AB` on the x-axis and
//! `D` above it. Every point except `D` has integer coordinates; `D`'s
//! ordinate is `sqrt(de_sq)` and is the only value produced by a float
//! operation. Circle membership of `D` is checked on integers first.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::GoldbachCertificate;
use crate::scalar::{Coord, ExactInt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("D is off the circle: ({p1} - {n})^2 + {de_sq} != {n}^2")]
    OffCircle { n: u128, p1: u128, de_sq: u128 },
    #[error("segments {p1} + {p2} do not form the diameter of radius {n}")]
    BadDiameter { n: u128, p1: u128, p2: u128 },
    #[error("canvas must be non-empty (got {canvas})")]
    EmptyCanvas { canvas: u32 },
    #[error("margin {margin} must lie in [0, 0.5)")]
    BadMargin { margin: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<F> {
    pub x: F,
    pub y: F,
}

impl<F: Coord> Point<F> {
    fn on_axis(x: i128) -> Self {
        Point {
            x: F::from_i128(x).expect("representable"),
            y: F::zero(),
        }
    }
}

/// Figure points in figure units (the radius is `n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneCoordinates<F> {
    pub n: u128,
    pub p1: u128,
    pub p2: u128,
    /// Exact square of `D`'s ordinate.
    pub de_sq: u128,
    pub a: Point<F>,
    pub b: Point<F>,
    pub c: Point<F>,
    pub e: Point<F>,
    pub d: Point<F>,
}

impl<F: Coord> SceneCoordinates<F> {
    pub const LABELS: [&'static str; 5] = ["A", "B", "C", "D", "E"];

    /// `(p1 - n)^2 + de_sq == n^2`, evaluated on integers.
    pub fn on_circle_exact(&self) -> bool {
        let dx = self.n.abs_diff(self.p1);
        dx.checked_mul(dx)
            .and_then(|s| s.checked_add(self.de_sq))
            .zip(self.n.checked_mul(self.n))
            .is_some_and(|(l, r)| l == r)
    }

    /// `| |CD| - n | / n` in float coordinates.
    pub fn radius_error(&self) -> F {
        let n = F::from_u128(self.n).expect("representable");
        let dist = (self.d.x - self.c.x).hypot(self.d.y - self.c.y);
        (dist - n).abs() / n
    }

    /// `E` and `C` coincide when `p1 = p2`.
    pub fn is_degenerate(&self) -> bool {
        self.p1 == self.p2
    }

    pub fn points(&self) -> [(&'static str, Point<F>); 5] {
        [
            ("A", self.a),
            ("B", self.b),
            ("C", self.c),
            ("D", self.d),
            ("E", self.e),
        ]
    }
}

/// Places the figure for a certificate.
pub fn layout<T: ExactInt, F: Coord>(
    c: &GoldbachCertificate<T>,
) -> Result<SceneCoordinates<F>, RenderError> {
    let wide = |x: T| x.to_u128().expect("unsigned fits u128");
    let (n, p1, p2, de_sq) = (wide(c.n), wide(c.p1), wide(c.p2), wide(c.de_sq));
    if p1 > p2 || p1.checked_add(p2) != n.checked_mul(2) {
        return Err(RenderError::BadDiameter { n, p1, p2 });
    }
    let mut scene = SceneCoordinates {
        n,
        p1,
        p2,
        de_sq,
        a: Point::on_axis(-(n as i128)),
        b: Point::on_axis(n as i128),
        c: Point::on_axis(0),
        e: Point::on_axis(p1 as i128 - n as i128),
        d: Point::on_axis(p1 as i128 - n as i128),
    };
    if !scene.on_circle_exact() {
        return Err(RenderError::OffCircle { n, p1, de_sq });
    }
    scene.d.y = F::from_u128(de_sq).expect("representable").sqrt();
    Ok(scene)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StyleOptions {
    /// Width and height of the square canvas in user units.
    pub canvas: u32,
    /// Fraction of the canvas left empty on each side.
    pub margin: f64,
    pub stroke_width: f64,
    pub font_size: f64,
}

impl Default for StyleOptions {
    fn default() -> Self {
        Self {
            canvas: 800,
            margin: 0.05,
            stroke_width: 2.0,
            font_size: 20.0,
        }
    }
}

// Shortest round-trip decimal, never "-0".
fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

/// Standalone SVG 1.1 document for a scene.
pub fn emit_svg<F: Coord>(s: &SceneCoordinates<F>, style: &StyleOptions) -> Result<String, RenderError> {
    if style.canvas == 0 {
        return Err(RenderError::EmptyCanvas {
            canvas: style.canvas,
        });
    }
    if !(0.0..0.5).contains(&style.margin) {
        return Err(RenderError::BadMargin {
            margin: style.margin.to_string(),
        });
    }
    let size = f64::from(style.canvas);
    let half = size / 2.0;
    let radius = half * (1.0 - 2.0 * style.margin);
    let scale = radius / s.n as f64;
    let map = |p: Point<F>| -> (f64, f64) {
        let x = p.x.to_f64().expect("finite");
        let y = p.y.to_f64().expect("finite");
        (half + x * scale, half - y * scale)
    };
    let [a, b, c, d, e] = [s.a, s.b, s.c, s.d, s.e].map(map);

    let mut out = String::new();
    let w = &mut out;
    // writing to a String cannot fail
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        style.canvas
    );
    let _ = writeln!(
        w,
        "  <title>Goldbach Circle n={} p1={} p2={}</title>",
        s.n, s.p1, s.p2
    );
    let _ = writeln!(
        w,
        r#"  <g fill="none" stroke="black" stroke-width="{}" stroke-linecap="round">"#,
        num(style.stroke_width)
    );
    let _ = writeln!(
        w,
        r#"    <circle cx="{}" cy="{}" r="{}"/>"#,
        num(c.0),
        num(c.1),
        num(radius)
    );
    let mut segments = vec![("AB", a, b), ("AD", a, d), ("DB", d, b), ("DE", d, e)];
    if !s.is_degenerate() {
        segments.push(("CD", c, d));
    }
    for (id, p, q) in segments {
        let _ = writeln!(
            w,
            r#"    <line id="{id}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(p.0),
            num(p.1),
            num(q.0),
            num(q.1)
        );
    }
    let _ = writeln!(w, "  </g>");

    let fs = style.font_size;
    // coincident E and C get pulled apart horizontally
    let split = if s.is_degenerate() { 0.6 * fs } else { 0.0 };
    let labels = [
        ("A", a.0 - 0.4 * fs, a.1 + 0.35 * fs, "end"),
        ("B", b.0 + 0.4 * fs, b.1 + 0.35 * fs, "start"),
        ("C", c.0 + split, c.1 + 1.2 * fs, "middle"),
        ("D", d.0, d.1 - 0.5 * fs, "middle"),
        ("E", e.0 - split, e.1 + 1.2 * fs, "middle"),
    ];
    let _ = writeln!(
        w,
        r#"  <g font-family="serif" font-style="italic" font-size="{}" fill="black">"#,
        num(fs)
    );
    for (label, x, y, anchor) in labels {
        let _ = writeln!(
            w,
            r#"    <text x="{}" y="{}" text-anchor="{anchor}">{label}</text>"#,
            num(x),
            num(y)
        );
    }
    let _ = writeln!(w, "  </g>");
    let _ = writeln!(w, "</svg>");
    Ok(out)
}
