//! The dual-plane subdivision: lines `y = alpha*x - beta` become points
//! `(alpha, beta)`, the lines stabbing both source polygons form the region
//! `L*` between envelopes of the polygons' vertex dual lines, and each
//! obstacle contributes an hourglass-shaped region `H*` of the lines that
//! hit it. Overlaying everything yields convex cells on which both the
//! crossed-edge quadruple and the blocked flag are constant.
//!
//! Construction: every scene vertex contributes one dual line; the bounding
//! box of `L*` is split incrementally by all dual lines into convex faces;
//! faces whose sample point stabs both polygons are kept as cells and
//! classified by that sample. Cell boundaries all lie on dual lines, so the
//! classification is constant over each open face. The output size is
//! quadratic in the input size, matching the subdivision's complexity bound.

use thiserror::Error;

use crate::geom::{ConvexPolygon, DualPoint, LineCoefficients, Point};

#[derive(Debug, Error)]
pub enum ArrangementError {
    #[error("source polygons are not separable by a vertical line")]
    NotSeparable,
    #[error("obstacle {index} is not strictly inside the vertical slab between the sources")]
    ObstacleOutsideSlab { index: usize },
    #[error("stabbing region is empty or degenerate")]
    EmptyStabbingRegion,
    #[error("could not classify cell {index}: sample line does not cross both polygons cleanly")]
    DegenerateCell { index: usize },
}

/// Dual line `beta = A*alpha + B` of a primal point.
#[derive(Clone, Copy, Debug)]
pub struct DualLine {
    pub a: f64,
    pub b: f64,
}

impl DualLine {
    pub fn of_point(p: Point) -> Self {
        let (a, b) = crate::geom::dual_line_of_point(p);
        DualLine { a, b }
    }

    #[inline]
    pub fn beta_at(&self, alpha: f64) -> f64 {
        self.a * alpha + self.b
    }

    /// Intersection alpha of two dual lines, if not parallel.
    pub fn intersect_alpha(&self, other: &DualLine) -> Option<f64> {
        let da = self.a - other.a;
        if da == 0.0 {
            return None;
        }
        Some((other.b - self.b) / da)
    }
}

/// The set of lines stabbing both source polygons, kept as the vertex dual
/// lines of each polygon. A line `(alpha, beta)` stabs a convex polygon iff
/// `beta` lies between the min and max of its vertex dual lines at `alpha`.
#[derive(Clone, Debug)]
pub struct StabbingRegion {
    p1_duals: Vec<DualLine>,
    p2_duals: Vec<DualLine>,
}

impl StabbingRegion {
    /// Requires `p1` strictly left of `p2` (separable by a vertical line).
    pub fn new(p1: &ConvexPolygon, p2: &ConvexPolygon) -> Result<Self, ArrangementError> {
        if !(p1.x_max() < p2.x_min()) {
            return Err(ArrangementError::NotSeparable);
        }
        Ok(StabbingRegion {
            p1_duals: p1.vertices().iter().map(|&v| DualLine::of_point(v)).collect(),
            p2_duals: p2.vertices().iter().map(|&v| DualLine::of_point(v)).collect(),
        })
    }

    fn envelope(duals: &[DualLine], alpha: f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in duals {
            let b = d.beta_at(alpha);
            lo = lo.min(b);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// Greatest lower envelope: `beta >= lower(alpha)` is necessary to stab
    /// both polygons.
    pub fn lower(&self, alpha: f64) -> f64 {
        let (lo1, _) = Self::envelope(&self.p1_duals, alpha);
        let (lo2, _) = Self::envelope(&self.p2_duals, alpha);
        lo1.max(lo2)
    }

    pub fn upper(&self, alpha: f64) -> f64 {
        let (_, hi1) = Self::envelope(&self.p1_duals, alpha);
        let (_, hi2) = Self::envelope(&self.p2_duals, alpha);
        hi1.min(hi2)
    }

    /// Membership: the primal line crosses both polygons (closed).
    pub fn contains(&self, d: DualPoint) -> bool {
        self.lower(d.alpha) <= d.beta && d.beta <= self.upper(d.alpha)
    }

    fn all_duals(&self) -> impl Iterator<Item = &DualLine> {
        self.p1_duals.iter().chain(self.p2_duals.iter())
    }

    /// Corner candidates of `L*`: intersections of vertex dual lines lying
    /// in the (slightly tolerant) closed region. The extreme points of `L*`
    /// are among them.
    pub fn corner_points(&self, tol: f64) -> Vec<DualPoint> {
        let lines: Vec<&DualLine> = self.all_duals().collect();
        let mut corners = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if let Some(alpha) = lines[i].intersect_alpha(lines[j]) {
                    let beta = lines[i].beta_at(alpha);
                    let slack = tol * (1.0 + alpha.abs() + beta.abs());
                    if self.lower(alpha) <= beta + slack && beta <= self.upper(alpha) + slack {
                        corners.push(DualPoint::new(alpha, beta));
                    }
                }
            }
        }
        corners
    }

    /// Axis-aligned box guaranteed to contain `L*`.
    pub fn bounding_box(&self) -> Result<(DualPoint, DualPoint), ArrangementError> {
        let corners = self.corner_points(1e-9);
        if corners.is_empty() {
            return Err(ArrangementError::EmptyStabbingRegion);
        }
        let mut lo = DualPoint::new(f64::INFINITY, f64::INFINITY);
        let mut hi = DualPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for c in &corners {
            lo.alpha = lo.alpha.min(c.alpha);
            lo.beta = lo.beta.min(c.beta);
            hi.alpha = hi.alpha.max(c.alpha);
            hi.beta = hi.beta.max(c.beta);
        }
        let margin_a = 1e-6 * (hi.alpha - lo.alpha).max(1e-9) + 1e-12;
        let margin_b = 1e-6 * (hi.beta - lo.beta).max(1e-9) + 1e-12;
        Ok((
            DualPoint::new(lo.alpha - margin_a, lo.beta - margin_b),
            DualPoint::new(hi.alpha + margin_a, hi.beta + margin_b),
        ))
    }

    /// Area of `L*` by exact piecewise-linear integration of the envelope
    /// gap: between consecutive pairwise-intersection alphas the integrand
    /// `max(0, upper - lower)` is linear, so the midpoint rule is exact.
    /// This is an independent check value for the cell-coverage invariant.
    pub fn area_by_envelope_quadrature(&self) -> f64 {
        let lines: Vec<&DualLine> = self.all_duals().collect();
        let mut breaks = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if let Some(a) = lines[i].intersect_alpha(lines[j]) {
                    breaks.push(a);
                }
            }
        }
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        breaks.dedup();
        let mut area = 0.0;
        for w in breaks.windows(2) {
            let (a0, a1) = (w[0], w[1]);
            let mid = 0.5 * (a0 + a1);
            let gap = self.upper(mid) - self.lower(mid);
            if gap > 0.0 {
                area += gap * (a1 - a0);
            }
        }
        area
    }
}

/// The hourglass `H*` of one obstacle: all lines hitting it, i.e.
/// `min_v (alpha v.x - v.y) <= beta <= max_v (alpha v.x - v.y)`.
#[derive(Clone, Debug)]
pub struct Hourglass {
    pub obstacle_index: usize,
    duals: Vec<DualLine>,
}

impl Hourglass {
    pub fn new(obstacle: &ConvexPolygon, obstacle_index: usize) -> Self {
        Hourglass {
            obstacle_index,
            duals: obstacle
                .vertices()
                .iter()
                .map(|&v| DualLine::of_point(v))
                .collect(),
        }
    }

    pub fn contains(&self, d: DualPoint) -> bool {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for l in &self.duals {
            let b = l.beta_at(d.alpha);
            lo = lo.min(b);
            hi = hi.max(b);
        }
        lo <= d.beta && d.beta <= hi
    }
}

/// A trapezoid in dual space with vertical sides: the unit of closed-form
/// integration. `bottom` and `top` are `(A, B)` pairs for `beta = A*alpha + B`.
#[derive(Clone, Copy, Debug)]
pub struct VerticalSpline {
    pub alpha1: f64,
    pub alpha2: f64,
    pub bottom: (f64, f64),
    pub top: (f64, f64),
}

impl VerticalSpline {
    pub fn area(&self) -> f64 {
        let gap = |a: f64| (self.top.0 - self.bottom.0) * a + (self.top.1 - self.bottom.1);
        0.5 * (gap(self.alpha1) + gap(self.alpha2)) * (self.alpha2 - self.alpha1)
    }
}

/// One convex cell of the overlay, annotated with the four crossed edges
/// (two per source polygon, ordered by crossing x-coordinate) and whether
/// any obstacle hourglass covers it.
#[derive(Clone, Debug)]
pub struct ArrangementCell {
    pub polygon: Vec<DualPoint>,
    /// Supporting lines of the crossed edges `[s1, s2, s3, s4]`.
    pub lines: [LineCoefficients; 4],
    /// Edge indices `(p1 entry, p1 exit, p2 entry, p2 exit)` by x-order.
    pub edge_indices: [usize; 4],
    pub blocked: bool,
    pub sample: DualPoint,
}

impl ArrangementCell {
    pub fn area(&self) -> f64 {
        polygon_area(&self.polygon)
    }
}

#[derive(Clone, Debug, Default)]
pub struct BuildDiagnostics {
    /// Faces of the full restricted arrangement (inside and outside `L*`).
    pub total_faces: usize,
    pub cell_count: usize,
    pub blocked_cells: usize,
}

/// The classified overlay.
#[derive(Clone, Debug)]
pub struct Arrangement {
    pub cells: Vec<ArrangementCell>,
    pub hourglasses: Vec<Hourglass>,
    pub diagnostics: BuildDiagnostics,
}

fn polygon_area(pts: &[DualPoint]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        s += p.alpha * q.beta - q.alpha * p.beta;
    }
    s / 2.0
}

fn polygon_centroid(pts: &[DualPoint]) -> DualPoint {
    let n = pts.len();
    let mut ca = 0.0;
    let mut cb = 0.0;
    let mut a = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = p.alpha * q.beta - q.alpha * p.beta;
        ca += (p.alpha + q.alpha) * w;
        cb += (p.beta + q.beta) * w;
        a += w;
    }
    DualPoint::new(ca / (3.0 * a), cb / (3.0 * a))
}

/// A convex face during construction.
struct Face {
    pts: Vec<DualPoint>,
    lo: DualPoint,
    hi: DualPoint,
}

impl Face {
    fn new(pts: Vec<DualPoint>) -> Self {
        let mut lo = DualPoint::new(f64::INFINITY, f64::INFINITY);
        let mut hi = DualPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &pts {
            lo.alpha = lo.alpha.min(p.alpha);
            lo.beta = lo.beta.min(p.beta);
            hi.alpha = hi.alpha.max(p.alpha);
            hi.beta = hi.beta.max(p.beta);
        }
        Face { pts, lo, hi }
    }

    /// Quick reject: the line misses the face's bounding box entirely.
    fn line_may_cross(&self, line: &DualLine) -> bool {
        let corners = [
            (self.lo.alpha, self.lo.beta),
            (self.lo.alpha, self.hi.beta),
            (self.hi.alpha, self.lo.beta),
            (self.hi.alpha, self.hi.beta),
        ];
        let mut pos = false;
        let mut neg = false;
        for (a, b) in corners {
            let d = line.beta_at(a) - b;
            pos |= d > 0.0;
            neg |= d < 0.0;
        }
        pos && neg
    }
}

/// Split a convex polygon by `beta = A*alpha + B`. Returns the below-side
/// and above-side pieces (either may be `None`). Vertices within `eps` of
/// the line belong to both pieces; slivers below `min_area` are dropped.
fn split_face(
    face: &[DualPoint],
    line: &DualLine,
    eps: f64,
    min_area: f64,
) -> (Option<Vec<DualPoint>>, Option<Vec<DualPoint>>) {
    let n = face.len();
    let side: Vec<f64> = face.iter().map(|p| line.beta_at(p.alpha) - p.beta).collect();
    let any_pos = side.iter().any(|&d| d > eps);
    let any_neg = side.iter().any(|&d| d < -eps);
    if !any_neg {
        return (Some(face.to_vec()), None);
    }
    if !any_pos {
        return (None, Some(face.to_vec()));
    }
    let mut below = Vec::with_capacity(n + 2);
    let mut above = Vec::with_capacity(n + 2);
    for i in 0..n {
        let (p, dp) = (face[i], side[i]);
        let (q, dq) = (face[(i + 1) % n], side[(i + 1) % n]);
        if dp >= -eps {
            below.push(p);
        }
        if dp <= eps {
            above.push(p);
        }
        if (dp > eps && dq < -eps) || (dp < -eps && dq > eps) {
            let t = dp / (dp - dq);
            let cut = DualPoint::new(
                p.alpha + t * (q.alpha - p.alpha),
                p.beta + t * (q.beta - p.beta),
            );
            below.push(cut);
            above.push(cut);
        }
    }
    let keep = |pts: Vec<DualPoint>| {
        if pts.len() >= 3 && polygon_area(&pts).abs() > min_area {
            Some(pts)
        } else {
            None
        }
    };
    (keep(below), keep(above))
}

/// The x-coordinates where the line `y = alpha x - beta` enters and leaves a
/// convex polygon, with the indices of the crossed edges, ordered by x.
fn crossed_edges(poly: &ConvexPolygon, d: DualPoint) -> Option<[(usize, f64); 2]> {
    let verts = poly.vertices();
    let n = verts.len();
    let mut hits: Vec<(usize, f64)> = Vec::with_capacity(2);
    let height = |v: &Point| d.alpha * v.x - d.beta - v.y;
    for i in 0..n {
        let hp = height(&verts[i]);
        let hq = height(&verts[(i + 1) % n]);
        // zero heights count as positive so a through-vertex line still
        // reports exactly two crossed edges
        let sp = hp > 0.0 || hp == 0.0;
        let sq = hq > 0.0 || hq == 0.0;
        if sp != sq {
            let t = hp / (hp - hq);
            let x = verts[i].x + t * (verts[(i + 1) % n].x - verts[i].x);
            hits.push((i, x));
        }
    }
    if hits.len() != 2 {
        return None;
    }
    if hits[0].1 > hits[1].1 {
        hits.swap(0, 1);
    }
    Some([hits[0], hits[1]])
}

/// Build the classified overlay for a case-1 scene (`p1` strictly left of
/// `p2`, every obstacle strictly inside the vertical slab between them).
pub fn build_arrangement(
    p1: &ConvexPolygon,
    p2: &ConvexPolygon,
    obstacles: &[ConvexPolygon],
    tol: f64,
) -> Result<Arrangement, ArrangementError> {
    let stab = StabbingRegion::new(p1, p2)?;
    let slab = (p1.x_max(), p2.x_min());
    for (i, obs) in obstacles.iter().enumerate() {
        if !(obs.x_min() > slab.0 && obs.x_max() < slab.1) {
            return Err(ArrangementError::ObstacleOutsideSlab { index: i });
        }
    }
    let (lo, hi) = stab.bounding_box()?;

    let mut dual_lines: Vec<DualLine> = Vec::new();
    for v in p1.vertices().iter().chain(p2.vertices()) {
        dual_lines.push(DualLine::of_point(*v));
    }
    for obs in obstacles {
        for v in obs.vertices() {
            dual_lines.push(DualLine::of_point(*v));
        }
    }

    let span_a = hi.alpha - lo.alpha;
    let span_b = hi.beta - lo.beta;
    let eps = tol * 1e-3 * span_b.max(1e-12);
    let box_area = span_a * span_b;
    let min_area = 1e-18 * box_area;

    let seed = vec![
        DualPoint::new(lo.alpha, lo.beta),
        DualPoint::new(hi.alpha, lo.beta),
        DualPoint::new(hi.alpha, hi.beta),
        DualPoint::new(lo.alpha, hi.beta),
    ];
    let mut faces: Vec<Face> = vec![Face::new(seed)];
    for line in &dual_lines {
        let mut next: Vec<Face> = Vec::with_capacity(faces.len() + 8);
        for face in faces {
            if !face.line_may_cross(line) {
                next.push(face);
                continue;
            }
            let (below, above) = split_face(&face.pts, line, eps, min_area);
            match (below, above) {
                (Some(b), Some(a)) => {
                    next.push(Face::new(b));
                    next.push(Face::new(a));
                }
                (Some(b), None) => next.push(Face::new(b)),
                (None, Some(a)) => next.push(Face::new(a)),
                (None, None) => {}
            }
        }
        faces = next;
    }

    let hourglasses: Vec<Hourglass> = obstacles
        .iter()
        .enumerate()
        .map(|(i, o)| Hourglass::new(o, i))
        .collect();

    let total_faces = faces.len();
    let mut cells = Vec::new();
    for (index, face) in faces.into_iter().enumerate() {
        let centroid = polygon_centroid(&face.pts);
        if !stab.contains(centroid) {
            continue;
        }
        // try the centroid, then points pulled toward each vertex, in case
        // the centroid's primal line grazes a polygon vertex
        let mut classified = None;
        let candidates = std::iter::once(centroid).chain(
            face.pts
                .iter()
                .map(move |v| DualPoint::new(
                    0.5 * (centroid.alpha + v.alpha),
                    0.5 * (centroid.beta + v.beta),
                )),
        );
        for sample in candidates {
            let (h1, h2) = match (crossed_edges(p1, sample), crossed_edges(p2, sample)) {
                (Some(a), Some(b)) => (a, b),
                _ => continue,
            };
            classified = Some((sample, h1, h2));
            break;
        }
        let (sample, hit1, hit2) =
            classified.ok_or(ArrangementError::DegenerateCell { index })?;
        let blocked = hourglasses.iter().any(|h| h.contains(sample));
        let lines = [
            p1.edge(hit1[0].0).line,
            p1.edge(hit1[1].0).line,
            p2.edge(hit2[0].0).line,
            p2.edge(hit2[1].0).line,
        ];
        cells.push(ArrangementCell {
            polygon: face.pts,
            lines,
            edge_indices: [hit1[0].0, hit1[1].0, hit2[0].0, hit2[1].0],
            blocked,
            sample,
        });
    }

    let blocked_cells = cells.iter().filter(|c| c.blocked).count();
    let diagnostics = BuildDiagnostics {
        total_faces,
        cell_count: cells.len(),
        blocked_cells,
    };
    Ok(Arrangement {
        cells,
        hourglasses,
        diagnostics,
    })
}

/// Split a convex cell into vertical splines at its vertex alphas. The
/// splines partition the cell and their areas sum to the cell area.
pub fn decompose_cell(polygon: &[DualPoint]) -> Vec<VerticalSpline> {
    let mut alphas: Vec<f64> = polygon.iter().map(|p| p.alpha).collect();
    alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let span = alphas.last().unwrap() - alphas.first().unwrap();
    let merge_eps = 1e-12 * span.max(1e-300);
    let mut events: Vec<f64> = Vec::with_capacity(alphas.len());
    for a in alphas {
        if events.last().map_or(true, |&last| a - last > merge_eps) {
            events.push(a);
        }
    }
    let n = polygon.len();
    let mut splines = Vec::with_capacity(events.len().saturating_sub(1));
    for w in events.windows(2) {
        let (a0, a1) = (w[0], w[1]);
        let mid = 0.5 * (a0 + a1);
        let mut bottom: Option<(f64, (f64, f64))> = None;
        let mut top: Option<(f64, (f64, f64))> = None;
        for i in 0..n {
            let p = polygon[i];
            let q = polygon[(i + 1) % n];
            let (la, ha) = if p.alpha <= q.alpha {
                (p.alpha, q.alpha)
            } else {
                (q.alpha, p.alpha)
            };
            if la <= mid && mid <= ha && ha - la > merge_eps {
                let a = (q.beta - p.beta) / (q.alpha - p.alpha);
                let b = p.beta - a * p.alpha;
                let val = a * mid + b;
                if bottom.map_or(true, |(v, _)| val < v) {
                    bottom = Some((val, (a, b)));
                }
                if top.map_or(true, |(v, _)| val > v) {
                    top = Some((val, (a, b)));
                }
            }
        }
        if let (Some((_, b)), Some((_, t))) = (bottom, top) {
            splines.push(VerticalSpline {
                alpha1: a0,
                alpha2: a1,
                bottom: b,
                top: t,
            });
        }
    }
    splines
}
