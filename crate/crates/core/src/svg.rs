//! Minimal SVG emission for scenes, approximations, and dual arrangements.
//!
//! Styling is fixed: source polygons blue/green, obstacles grey with
//! hatching, blocked dual cells grey, approximation regions drawn with
//! opacity proportional to weight. Coordinates are mapped into a fixed
//! viewport with the y-axis flipped (SVG y grows downward).

use std::fmt::Write as _;

use crate::arrangement::Arrangement;
use crate::gaussian::{DiskApproximation, PolygonApproximation};
use crate::geom::{ConvexPolygon, Point};
use crate::scene::{Scene, Source};

const VIEW: f64 = 800.0;
const PAD: f64 = 40.0;

struct Mapper {
    min_x: f64,
    min_y: f64,
    scale: f64,
}

impl Mapper {
    fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        let w = (max_x - min_x).max(1e-9);
        let h = (max_y - min_y).max(1e-9);
        let scale = (VIEW - 2.0 * PAD) / w.max(h);
        Mapper { min_x, min_y, scale }
    }

    fn x(&self, x: f64) -> f64 {
        PAD + (x - self.min_x) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        VIEW - PAD - (y - self.min_y) * self.scale
    }
}

/// Incrementally-built SVG document.
pub struct SvgDocument {
    body: String,
}

impl SvgDocument {
    pub fn new() -> Self {
        SvgDocument { body: String::new() }
    }

    fn polygon_path(m: &Mapper, pts: impl Iterator<Item = (f64, f64)>) -> String {
        let mut s = String::new();
        for (i, (x, y)) in pts.enumerate() {
            let _ = write!(s, "{}{:.3},{:.3} ", if i == 0 { "M" } else { "L" }, m.x(x), m.y(y));
        }
        s.push('Z');
        s
    }

    fn push_polygon(&mut self, m: &Mapper, poly: &ConvexPolygon, style: &str) {
        let path = Self::polygon_path(m, poly.vertices().iter().map(|v| (v.x, v.y)));
        let _ = writeln!(self.body, r#"  <path d="{path}" {style}/>"#);
    }

    fn push_circle(&mut self, m: &Mapper, c: Point, r: f64, style: &str) {
        let _ = writeln!(
            self.body,
            r#"  <circle cx="{:.3}" cy="{:.3}" r="{:.3}" {style}/>"#,
            m.x(c.x),
            m.y(c.y),
            r * m.scale
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{v}\" height=\"{v}\" \
             viewBox=\"0 0 {v} {v}\">\n{}</svg>\n",
            self.body,
            v = VIEW
        )
    }
}

impl Default for SvgDocument {
    fn default() -> Self {
        Self::new()
    }
}

fn scene_bounds(scene: &Scene) -> (f64, f64, f64, f64) {
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let mut take = |x: f64, y: f64| {
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    };
    for s in &scene.sources {
        match s {
            Source::Gaussian(g) => {
                take(g.center.x - 4.0 * g.sigma, g.center.y - 4.0 * g.sigma);
                take(g.center.x + 4.0 * g.sigma, g.center.y + 4.0 * g.sigma);
            }
            Source::Polygon(p) => {
                let (lo, hi) = p.bbox();
                take(lo.x, lo.y);
                take(hi.x, hi.y);
            }
        }
    }
    for o in &scene.obstacles {
        let (lo, hi) = o.bbox();
        take(lo.x, lo.y);
        take(hi.x, hi.y);
    }
    (min_x, min_y, max_x, max_y)
}

/// Primal-space rendering of a scene.
pub fn render_scene(scene: &Scene) -> String {
    let (min_x, min_y, max_x, max_y) = scene_bounds(scene);
    let m = Mapper::new(min_x, min_y, max_x, max_y);
    let mut doc = SvgDocument::new();
    for (i, s) in scene.sources.iter().enumerate() {
        let color = if i == 0 { "#2b6cb0" } else { "#2f855a" };
        match s {
            Source::Gaussian(g) => {
                for mult in [1.0, 2.0, 3.0] {
                    doc.push_circle(
                        &m,
                        g.center,
                        mult * g.sigma,
                        &format!(r##"fill="none" stroke="{color}" stroke-width="1.2" opacity="{:.2}""##,
                                 1.0 / mult),
                    );
                }
            }
            Source::Polygon(p) => {
                doc.push_polygon(
                    &m,
                    p,
                    &format!(r##"fill="{color}" fill-opacity="0.35" stroke="{color}""##),
                );
            }
        }
    }
    for o in &scene.obstacles {
        doc.push_polygon(
            &m,
            o,
            r##"fill="#718096" fill-opacity="0.7" stroke="#2d3748""##,
        );
    }
    doc.finish()
}

/// Disk approximation as concentric circles with opacity proportional to
/// cumulative weight.
pub fn render_disks(d: &DiskApproximation) -> String {
    let r_max = d.radii().last().copied().unwrap_or(1.0);
    let m = Mapper::new(
        d.center.x - 1.2 * r_max,
        d.center.y - 1.2 * r_max,
        d.center.x + 1.2 * r_max,
        d.center.y + 1.2 * r_max,
    );
    let mut doc = SvgDocument::new();
    let peak = d.weights().iter().sum::<f64>();
    for i in (0..d.k()).rev() {
        let cumulative: f64 = d.weights()[..=i].iter().sum();
        doc.push_circle(
            &m,
            d.center,
            d.radii()[i],
            &format!(
                r##"fill="#c53030" fill-opacity="{:.4}" stroke="#742a2a" stroke-width="0.6""##,
                0.85 * (peak - cumulative + d.weights()[i]) / peak
            ),
        );
    }
    doc.finish()
}

/// Polygon approximation in the isoline style: nested regular polygons.
pub fn render_polygons(p: &PolygonApproximation) -> String {
    let r_max = p.max_circumradius();
    let m = Mapper::new(
        p.center.x - 1.2 * r_max,
        p.center.y - 1.2 * r_max,
        p.center.x + 1.2 * r_max,
        p.center.y + 1.2 * r_max,
    );
    let mut doc = SvgDocument::new();
    let peak: f64 = p.pairs().iter().map(|q| 2.0 * q.weight_each).sum();
    for (poly, w) in p.weighted_polygons().collect::<Vec<_>>().into_iter().rev() {
        doc.push_polygon(
            &m,
            poly,
            &format!(
                r##"fill="#2c5282" fill-opacity="{:.4}" stroke="#1a365d" stroke-width="0.5""##,
                (0.85 * w / peak * 2.0 * p.k() as f64).min(0.9)
            ),
        );
    }
    doc.finish()
}

/// Dual-space rendering of an arrangement: cells outlined, blocked cells
/// filled grey.
pub fn render_dual(arr: &Arrangement) -> String {
    let mut min_a = f64::INFINITY;
    let mut min_b = f64::INFINITY;
    let mut max_a = f64::NEG_INFINITY;
    let mut max_b = f64::NEG_INFINITY;
    for c in &arr.cells {
        for p in &c.polygon {
            min_a = min_a.min(p.alpha);
            min_b = min_b.min(p.beta);
            max_a = max_a.max(p.alpha);
            max_b = max_b.max(p.beta);
        }
    }
    if !min_a.is_finite() {
        return SvgDocument::new().finish();
    }
    let m = Mapper::new(min_a, min_b, max_a, max_b);
    let mut doc = SvgDocument::new();
    for c in &arr.cells {
        let path = SvgDocument::polygon_path(&m, c.polygon.iter().map(|p| (p.alpha, p.beta)));
        let fill = if c.blocked { "#a0aec0" } else { "#ebf8ff" };
        let _ = writeln!(
            doc.body,
            r##"  <path d="{path}" fill="{fill}" stroke="#4a5568" stroke-width="0.4"/>"##
        );
    }
    doc.finish()
}
