//! Minimal SVG output restricted to circles, circular arcs and polylines.
//!
//! Disc coordinates map to a square canvas with `y` pointing up.

use std::fmt::Write;

use gh_ansatz::tessellation::Geodesic;
use gh_ansatz::Complex;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;

fn scale() -> f64 {
    0.5 * SIZE - MARGIN
}

fn screen(z: Complex) -> (f64, f64) {
    (0.5 * SIZE + scale() * z.re, 0.5 * SIZE - scale() * z.im)
}

fn num(x: f64) -> String {
    format!("{x:.4}")
}

#[derive(Debug, Clone)]
pub struct Svg {
    body: String,
}

impl Default for Svg {
    fn default() -> Self {
        Self::new()
    }
}

impl Svg {
    pub fn new() -> Self {
        Self { body: String::new() }
    }

    /// The canvas with the unit circle drawn.
    pub fn disc() -> Self {
        let mut s = Self::new();
        s.circle(Complex::new(0.0, 0.0), 1.0, "black", "none");
        s
    }

    pub fn circle(&mut self, c: Complex, r: f64, stroke: &str, fill: &str) {
        let (x, y) = screen(c);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" stroke="{stroke}" fill="{fill}" stroke-width="1"/>"#,
            num(x),
            num(y),
            num(r * scale())
        );
    }

    pub fn dot(&mut self, c: Complex, colour: &str) {
        let (x, y) = screen(c);
        let _ = writeln!(self.body, r#"<circle cx="{}" cy="{}" r="1.5" fill="{colour}"/>"#, num(x), num(y));
    }

    /// The arc of a geodesic between two of its points, drawn inside the disc.
    pub fn geodesic(&mut self, g: &Geodesic, a: Complex, b: Complex, stroke: &str) {
        match *g {
            Geodesic::Diameter { .. } => self.polyline(&[a, b], stroke),
            Geodesic::Circle { center, radius } => {
                let (ax, ay) = screen(a);
                let (bx, by) = screen(b);
                let (cx, cy) = screen(center);
                // The short arc bulges away from the centre; pick the sweep
                // whose rotation from a to b about the centre is that arc.
                let cross = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
                let sweep = u8::from(cross > 0.0);
                let r = num(radius * scale());
                let _ = writeln!(
                    self.body,
                    r#"<path d="M {} {} A {r} {r} 0 0 {sweep} {} {}" stroke="{stroke}" fill="none" stroke-width="0.7"/>"#,
                    num(ax),
                    num(ay),
                    num(bx),
                    num(by)
                );
            }
        }
    }

    pub fn polyline(&mut self, pts: &[Complex], stroke: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&z| {
                let (x, y) = screen(z);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" stroke="{stroke}" fill="none" stroke-width="1"/>"#,
            coords.join(" ")
        );
    }

    /// A polyline in plot coordinates `[0, 1]²` rather than disc coordinates.
    pub fn plot_line(&mut self, pts: &[(f64, f64)], stroke: &str) {
        let mapped: Vec<Complex> = pts.iter().map(|&(x, y)| Complex::new(2.0 * x - 1.0, 2.0 * y - 1.0)).collect();
        self.polyline(&mapped, stroke);
    }

    pub fn render(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n{}</svg>\n",
            self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_allowed_elements() {
        let mut s = Svg::disc();
        let g = Geodesic::through(Complex::new(1.0, 0.0), Complex::new(0.0, 1.0));
        s.geodesic(&g, Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), "blue");
        s.polyline(&[Complex::new(0.0, 0.0), Complex::new(0.5, 0.5)], "red");
        let out = s.render();
        for line in out.lines().skip(1) {
            assert!(
                line.starts_with("<circle") || line.starts_with("<path d=\"M") || line.starts_with("<polyline") || line == "</svg>",
                "{line}"
            );
        }
        assert_eq!(out.matches(" A ").count(), 1);
    }

    #[test]
    fn arc_bulges_towards_origin() {
        // The geodesic from 1 to i curves towards the origin, so its
        // screen midpoint is inside the chord's screen midpoint.
        let g = Geodesic::through(Complex::new(1.0, 0.0), Complex::new(0.0, 1.0));
        if let Geodesic::Circle { center, radius } = g {
            let mid = center - center / center.norm() * radius;
            assert!(mid.norm() < std::f64::consts::FRAC_1_SQRT_2);
        } else {
            panic!("expected a circle");
        }
    }
}
