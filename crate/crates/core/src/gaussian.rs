//! Optimal approximation of an isotropic Gaussian by weighted concentric
//! disks and its refinement into weighted regular polygons.
//!
//! The density `mu(r) = exp(-r^2 / (2 sigma^2)) / (2 pi sigma^2)` is
//! approximated by a cylindrical step function built from `k` nested disks
//! with radii `r_i` and weights `w_i`, all in closed form:
//!
//! ```text
//! r_i   = sqrt(2 sigma^2 ln( k(k+1) / (k+1-i)^2 ))
//! w_i   = (k+1-i) / (pi sigma^2 k (k+1))
//! rho_i = sqrt(2 sigma^2 ln( k(k+1) / ((k+1-i)(k+2-i)) ))
//! ```
//!
//! where the crossover radii `rho_i` are where the step function crosses the
//! density (`rho_1 = 0`, `rho_{k+1} = +inf`). The symmetric-difference error
//! is `ln((k+1)/k)`, so `k = ceil(1 / (e^eps - 1))` disks achieve error
//! `eps`. Each disk is then bracketed by two annuli whose inner/outer radii
//! split the density gap in half, and a regular polygon inscribed in each
//! annulus (weight `w_i / 2` apiece) approximates the Gaussian at least as
//! well as the disks while exposing only straight edges.
//!
//! On approximation styles: a locally multiplicative bound on the density
//! would give a global volume bound, but no finite region set achieves one
//! for a Gaussian, and a locally additive bound gives no global guarantee at
//! all; the constructions here therefore control the symmetric-difference
//! volume directly.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geom::{ConvexPolygon, Point, RegionShape, WeightedRegionSet};
use crate::mc::{self, McEstimate};

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("sigma must be positive and finite")]
    InvalidSigma,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("radii and crossovers must interleave: 0 <= rho_1 <= r_1 <= rho_2 <= ... <= r_k")]
    InterleavingViolated,
}

/// An isotropic 2-D Gaussian.
#[derive(Clone, Copy, Debug)]
pub struct Gaussian {
    pub center: Point,
    pub sigma: f64,
}

impl Gaussian {
    pub fn new(center: Point, sigma: f64) -> Result<Self, ApproxError> {
        if !(sigma.is_finite() && sigma > 0.0) || !center.is_finite() {
            return Err(ApproxError::InvalidSigma);
        }
        Ok(Gaussian { center, sigma })
    }

    /// Peak density `mu(0) = 1 / (2 pi sigma^2)`.
    pub fn peak_density(&self) -> f64 {
        1.0 / (2.0 * PI * self.sigma * self.sigma)
    }

    /// Density at radial distance `r` from the center.
    pub fn density_radial(&self, r: f64) -> f64 {
        self.peak_density() * (-r * r / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn density(&self, p: Point) -> f64 {
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        self.density_radial((dx * dx + dy * dy).sqrt())
    }
}

/// Tail volume `V(chi)`: the Gaussian mass outside the open disk of radius
/// `chi`, equal to `exp(-chi^2 / (2 sigma^2))`.
pub fn tail_volume(chi: f64, sigma: f64) -> f64 {
    (-chi * chi / (2.0 * sigma * sigma)).exp()
}

/// Number of disks needed for error `eps`: `ceil(1 / (e^eps - 1))`, at least 1.
pub fn k_for_epsilon(eps: f64) -> Result<usize, ApproxError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(ApproxError::NonPositiveEpsilon);
    }
    let raw = 1.0 / (eps.exp() - 1.0);
    Ok((raw.ceil() as usize).max(1))
}

/// Symmetric-difference volume between the Gaussian and the optimal
/// `k`-disk step function: `ln((k+1)/k)`.
pub fn disk_error(k: usize) -> f64 {
    ((k as f64 + 1.0) / k as f64).ln()
}

/// The optimal cylindrical step function for a Gaussian: `k` nested disks
/// with their weights and the crossover radii where the step function and
/// the density agree.
#[derive(Clone, Debug)]
pub struct DiskApproximation {
    pub center: Point,
    pub sigma: f64,
    /// `r_1 < r_2 < ... < r_k` (indices 0-based in storage).
    radii: Vec<f64>,
    /// `w_1 > w_2 > ... > w_k`, density units.
    weights: Vec<f64>,
    /// `rho_1 = 0, rho_2, ..., rho_k, rho_{k+1} = +inf` (length `k + 1`).
    crossovers: Vec<f64>,
}

/// Closed-form optimal disks for a Gaussian.
pub fn optimal_disks(g: &Gaussian, k: usize) -> Result<DiskApproximation, ApproxError> {
    if k == 0 {
        return Err(ApproxError::ZeroK);
    }
    let s2 = g.sigma * g.sigma;
    let kk1 = (k * (k + 1)) as f64;
    let mut radii = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    let mut crossovers = Vec::with_capacity(k + 1);
    for i in 1..=k {
        let rem = (k + 1 - i) as f64;
        radii.push((2.0 * s2 * (kk1 / (rem * rem)).ln()).sqrt());
        weights.push(rem / (PI * s2 * kk1));
        crossovers.push((2.0 * s2 * (kk1 / (rem * (rem + 1.0))).ln()).sqrt());
    }
    crossovers.push(f64::INFINITY);
    Ok(DiskApproximation {
        center: g.center,
        sigma: g.sigma,
        radii,
        weights,
        crossovers,
    })
}

impl DiskApproximation {
    pub fn k(&self) -> usize {
        self.radii.len()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Crossover radii including the `+inf` sentinel at index `k`.
    pub fn crossovers(&self) -> &[f64] {
        &self.crossovers
    }

    /// Tail weight `W_i = sum_{j >= i} w_j` for 0-based `i`.
    pub fn tail_weight(&self, i: usize) -> f64 {
        self.weights[i..].iter().sum()
    }

    /// Step-function value at radial distance `r` from the center.
    pub fn step_value(&self, r: f64) -> f64 {
        self.radii
            .iter()
            .zip(&self.weights)
            .filter(|(ri, _)| r <= **ri)
            .map(|(_, w)| w)
            .sum()
    }

    /// Inner and outer annulus radii `(r'_i, r''_i)` around disk `i`
    /// (0-based), splitting the density gap in half on each side:
    /// `mu(r') = (mu(rho_i) + mu(r_i)) / 2` and
    /// `mu(r'') = (mu(r_i) + mu(rho_{i+1})) / 2`.
    pub fn annulus_radii(&self, i: usize) -> (f64, f64) {
        let k = self.k();
        assert!(i < k);
        let s2 = self.sigma * self.sigma;
        let idx = (i + 1) as f64; // 1-based index in the closed forms
        let kf = k as f64;
        let rem = kf + 1.0 - idx;
        let r_prime = (2.0 * s2 * (2.0 * kf * (kf + 1.0) / (rem * (2.0 * kf + 3.0 - 2.0 * idx))).ln())
            .sqrt();
        let r_dprime =
            (2.0 * s2 * (2.0 * kf * (kf + 1.0) / (rem * (2.0 * kf + 1.0 - 2.0 * idx))).ln()).sqrt();
        (r_prime, r_dprime)
    }

    pub fn as_region_set(&self) -> WeightedRegionSet {
        let mut set = WeightedRegionSet::new();
        for (r, w) in self.radii.iter().zip(&self.weights) {
            set.push(
                RegionShape::Disk {
                    center: self.center,
                    radius: *r,
                },
                *w,
            );
        }
        set
    }
}

/// The symmetric-difference functional `F(r, rho)` between the Gaussian and
/// the step function with crossing radii `rho`, written with
/// `V(chi) = exp(-chi^2/(2 sigma^2))`:
///
/// ```text
/// F = -V(rho_1) + 2 sum_i V(r_i) - 2 sum_{i>=2} V(rho_i)
///     + (1/2 sigma^2) sum_i r_i^2 (V(rho_i) + V(rho_{i+1}))
///     - (1/sigma^2) sum_{i>=2} rho_i^2 V(rho_i)
/// ```
///
/// with `rho_{k+1} = +inf`. At the optimal parameters this equals
/// [`disk_error`]`(k)`.
pub fn error_functional(radii: &[f64], crossovers: &[f64], sigma: f64) -> Result<f64, ApproxError> {
    let k = radii.len();
    if k == 0 || crossovers.len() != k {
        return Err(ApproxError::ZeroK);
    }
    let mut prev = 0.0;
    for i in 0..k {
        if !(crossovers[i] >= prev && radii[i] >= crossovers[i]) {
            return Err(ApproxError::InterleavingViolated);
        }
        prev = radii[i];
    }
    let s2 = sigma * sigma;
    let v = |chi: f64| tail_volume(chi, sigma);
    let mut f = -v(crossovers[0]);
    for i in 0..k {
        f += 2.0 * v(radii[i]);
        let rho_next = if i + 1 < k { v(crossovers[i + 1]) } else { 0.0 };
        f += radii[i] * radii[i] * (v(crossovers[i]) + rho_next) / (2.0 * s2);
        if i >= 1 {
            f -= 2.0 * v(crossovers[i]);
            f -= crossovers[i] * crossovers[i] * v(crossovers[i]) / s2;
        }
    }
    Ok(f)
}

/// One annulus pair of the polygonal refinement: a regular polygon inscribed
/// in `{r'_i, r_i}` and one inscribed in `{r_i, r''_i}`, each carrying half
/// the disk weight.
#[derive(Clone, Debug)]
pub struct PolygonPair {
    pub inner: ConvexPolygon,
    pub outer: ConvexPolygon,
    pub weight_each: f64,
    pub inner_vertex_count: usize,
    pub outer_vertex_count: usize,
}

/// The `2k`-polygon refinement of a disk approximation.
#[derive(Clone, Debug)]
pub struct PolygonApproximation {
    pub center: Point,
    pub sigma: f64,
    pairs: Vec<PolygonPair>,
}

/// Vertex count for a regular polygon inscribed in an annulus with radius
/// ratio `r_inner / r_outer`: the smallest `n` with
/// `cos(pi/n) >= r_inner/r_outer`, i.e. `ceil(pi / arccos(ratio))`.
/// Near-integer quotients are snapped before the ceiling so that exact fits
/// (like the ratio `sqrt(1/2)` giving a square) do not round up.
pub fn vertex_count_for_annulus(r_inner: f64, r_outer: f64) -> usize {
    debug_assert!(r_inner < r_outer);
    let q = PI / (r_inner / r_outer).acos();
    let snapped = if (q - q.round()).abs() < 1e-9 { q.round() } else { q.ceil() };
    (snapped as usize).max(3)
}

/// Regular `n`-gon with given circumscribed radius; `phase` is the angle of
/// the first vertex from the positive x-axis.
pub fn regular_polygon(center: Point, n: usize, circumradius: f64, phase: f64) -> ConvexPolygon {
    let verts = (0..n)
        .map(|j| {
            let t = phase + 2.0 * PI * j as f64 / n as f64;
            Point::new(
                center.x + circumradius * t.cos(),
                center.y + circumradius * t.sin(),
            )
        })
        .collect();
    ConvexPolygon::new(verts).expect("regular polygon is strictly convex")
}

/// Refine a disk approximation into `2k` weighted regular polygons.
///
/// Pair `i` inscribes an `n'_i`-gon in the annulus `{r'_i, r_i}` and an
/// `n''_i`-gon in `{r_i, r''_i}`, each weighted `w_i / 2`. The inner polygon
/// has phase 0; the outer is rotated by half its own vertex step.
pub fn polygonize(d: &DiskApproximation) -> PolygonApproximation {
    let mut pairs = Vec::with_capacity(d.k());
    for i in 0..d.k() {
        let (r_prime, r_dprime) = d.annulus_radii(i);
        let r = d.radii[i];
        let n_inner = vertex_count_for_annulus(r_prime, r);
        let n_outer = vertex_count_for_annulus(r, r_dprime);
        let inner = regular_polygon(d.center, n_inner, r, 0.0);
        let outer = regular_polygon(d.center, n_outer, r_dprime, PI / n_outer as f64);
        pairs.push(PolygonPair {
            inner,
            outer,
            weight_each: d.weights[i] / 2.0,
            inner_vertex_count: n_inner,
            outer_vertex_count: n_outer,
        });
    }
    PolygonApproximation {
        center: d.center,
        sigma: d.sigma,
        pairs,
    }
}

impl PolygonApproximation {
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[PolygonPair] {
        &self.pairs
    }

    /// All `2k` polygons with their weights, innermost first.
    pub fn weighted_polygons(&self) -> impl Iterator<Item = (&ConvexPolygon, f64)> + '_ {
        self.pairs.iter().flat_map(|p| {
            [(&p.inner, p.weight_each), (&p.outer, p.weight_each)].into_iter()
        })
    }

    pub fn as_region_set(&self) -> WeightedRegionSet {
        let mut set = WeightedRegionSet::new();
        for (poly, w) in self.weighted_polygons() {
            set.push(RegionShape::Polygon(poly.clone()), w);
        }
        set
    }

    /// Total probability mass carried by the weighted polygons,
    /// `sum_i (w_i/2) (area(inner_i) + area(outer_i))`; strictly below 1.
    pub fn weighted_mass(&self) -> f64 {
        self.weighted_polygons().map(|(p, w)| w * p.area()).sum()
    }

    /// Circumradius of the outermost polygon.
    pub fn max_circumradius(&self) -> f64 {
        let last = self.pairs.last().expect("k >= 1");
        last.outer
            .vertices()
            .iter()
            .map(|v| {
                let dx = v.x - self.center.x;
                let dy = v.y - self.center.y;
                (dx * dx + dy * dy).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Monte-Carlo estimate of the symmetric-difference volume
/// `integral |mu(p) - m(p)| dp` by importance sampling from the Gaussian
/// itself: the integral equals `E_{p ~ mu} [ |mu(p) - m(p)| / mu(p) ]`.
pub fn approximation_error_mc(
    g: &Gaussian,
    m: &WeightedRegionSet,
    samples: u64,
    seed: u64,
) -> McEstimate {
    mc::estimate_mean(samples, seed, |rng| {
        let (nx, ny) = mc::standard_normal_pair(rng);
        let p = Point::new(g.center.x + g.sigma * nx, g.center.y + g.sigma * ny);
        let mu = g.density(p);
        (mu - m.evaluate(p)).abs() / mu
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn k_for_epsilon_boundaries() {
        assert_eq!(k_for_epsilon(LN2).unwrap(), 1);
        assert_eq!(k_for_epsilon(1.5f64.ln()).unwrap(), 2);
        assert_eq!(k_for_epsilon(0.01).unwrap(), 100);
        assert_eq!(k_for_epsilon(10.0).unwrap(), 1);
        assert!(k_for_epsilon(0.0).is_err());
        assert!(k_for_epsilon(-1.0).is_err());
    }

    #[test]
    fn optimal_disks_k1() {
        let g = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let d = optimal_disks(&g, 1).unwrap();
        assert!((d.radii()[0] - (2.0 * LN2).sqrt()).abs() < 1e-12);
        assert!((d.weights()[0] - 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert_eq!(d.crossovers()[0], 0.0);
        assert!(d.crossovers()[1].is_infinite());
    }

    #[test]
    fn optimal_disks_k2() {
        let g = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let d = optimal_disks(&g, 2).unwrap();
        assert!((d.radii()[0] - (2.0 * 1.5f64.ln()).sqrt()).abs() < 1e-12);
        assert!((d.radii()[1] - (2.0 * 6.0f64.ln()).sqrt()).abs() < 1e-12);
        assert!((d.weights()[0] - 1.0 / (3.0 * PI)).abs() < 1e-12);
        assert!((d.weights()[1] - 1.0 / (6.0 * PI)).abs() < 1e-12);
        assert_eq!(d.crossovers()[0], 0.0);
        assert!((d.crossovers()[1] - (2.0 * 3.0f64.ln()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn disk_weights_sum_to_peak_density() {
        for k in [1usize, 2, 3, 7, 20, 50] {
            for sigma in [0.5, 1.0, 3.0] {
                let g = Gaussian::new(Point::new(0.0, 0.0), sigma).unwrap();
                let d = optimal_disks(&g, k).unwrap();
                let total: f64 = d.weights().iter().sum();
                assert!(
                    (total - g.peak_density()).abs() < 1e-12 * g.peak_density(),
                    "k={k} sigma={sigma}"
                );
            }
        }
    }

    #[test]
    fn stationarity_identities() {
        // 2 rho_i^2 = r_{i-1}^2 + r_i^2  and
        // 2 V(r_i) = V(rho_i) + V(rho_{i+1})
        for k in [1usize, 2, 5, 17, 50] {
            for sigma in [0.5, 1.0, 3.0] {
                let g = Gaussian::new(Point::new(0.0, 0.0), sigma).unwrap();
                let d = optimal_disks(&g, k).unwrap();
                for i in 1..k {
                    let lhs = 2.0 * d.crossovers()[i] * d.crossovers()[i];
                    let rhs = d.radii()[i - 1].powi(2) + d.radii()[i].powi(2);
                    assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
                }
                for i in 0..k {
                    let lhs = 2.0 * tail_volume(d.radii()[i], sigma);
                    let rho_next = if i + 1 < k {
                        tail_volume(d.crossovers()[i + 1], sigma)
                    } else {
                        0.0
                    };
                    let rhs = tail_volume(d.crossovers()[i], sigma) + rho_next;
                    assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-30));
                }
            }
        }
    }

    #[test]
    fn error_functional_at_optimum_matches_disk_error() {
        for k in [1usize, 2, 5] {
            let g = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
            let d = optimal_disks(&g, k).unwrap();
            let f = error_functional(d.radii(), &d.crossovers()[..k], 1.0).unwrap();
            assert!(
                (f - disk_error(k)).abs() < 1e-12,
                "k={k}: {f} vs {}",
                disk_error(k)
            );
        }
    }

    #[test]
    fn error_functional_detects_bad_interleaving() {
        assert!(matches!(
            error_functional(&[1.0, 0.5], &[0.0, 2.0], 1.0),
            Err(ApproxError::InterleavingViolated)
        ));
    }

    #[test]
    fn perturbed_parameters_increase_error() {
        let g = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let d = optimal_disks(&g, 2).unwrap();
        let mut radii = d.radii().to_vec();
        radii[0] *= 1.1;
        let f = error_functional(&radii, &d.crossovers()[..2], 1.0).unwrap();
        assert!(f > disk_error(2) + 1e-6);
    }

    #[test]
    fn tail_volume_examples() {
        assert_eq!(tail_volume(0.0, 1.0), 1.0);
        let chi = (2.0 * LN2).sqrt();
        assert!((tail_volume(chi, 1.0) - 0.5).abs() < 1e-12);
        assert_eq!(tail_volume(f64::INFINITY, 1.0), 0.0);
    }

    #[test]
    fn annulus_radii_k1() {
        let g = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let d = optimal_disks(&g, 1).unwrap();
        let (rp, rpp) = d.annulus_radii(0);
        assert!((rp - (2.0 * (4.0f64 / 3.0).ln()).sqrt()).abs() < 1e-12);
        assert!((rpp - (2.0 * 4.0f64.ln()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn annulus_ordering_holds_for_all_k_up_to_50() {
        let g = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        for k in 1..=50 {
            let d = optimal_disks(&g, k).unwrap();
            for i in 0..k {
                let (rp, rpp) = d.annulus_radii(i);
                assert!(d.crossovers()[i] < rp);
                assert!(rp < d.radii()[i]);
                assert!(d.radii()[i] < rpp);
                assert!(rpp < d.crossovers()[i + 1]);
            }
        }
    }

    #[test]
    fn polygonize_k1_gives_square() {
        let g = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let d = optimal_disks(&g, 1).unwrap();
        let p = polygonize(&d);
        assert_eq!(p.pairs()[0].inner_vertex_count, 4);
        // ratio r1/r''1 = sqrt(ln2 / ln4) = sqrt(1/2) fits a square exactly
        assert_eq!(p.pairs()[0].outer_vertex_count, 4);
    }

    #[test]
    fn polygon_set_value_at_center_is_peak_density() {
        let g = Gaussian::new(Point::new(0.5, -2.0), 1.3).unwrap();
        let d = optimal_disks(&g, 4).unwrap();
        let p = polygonize(&d);
        let m = p.as_region_set().evaluate(g.center);
        assert!((m - g.peak_density()).abs() < 1e-12 * g.peak_density());
    }

    #[test]
    fn polygon_value_between_pair_is_weight_midpoint() {
        let g = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let d = optimal_disks(&g, 3).unwrap();
        let p = polygonize(&d);
        let set = p.as_region_set();
        for i in 0..3 {
            // a point just outside the inner polygon's circumradius lies
            // between the pair (inner circumradius r_i, outer inradius >= r_i)
            let r = d.radii()[i] * (1.0 + 1e-9);
            let dir = 0.3_f64; // radians, away from any vertex/edge alignment
            let q = Point::new(r * dir.cos(), r * dir.sin());
            let expect = (d.tail_weight(i)
                + if i + 1 < 3 { d.tail_weight(i + 1) } else { 0.0 })
                / 2.0;
            assert!(
                (set.evaluate(q) - expect).abs() < 1e-12,
                "pair {i}: {} vs {expect}",
                set.evaluate(q)
            );
        }
    }

    #[test]
    fn vertex_count_bound_over_all_i_k_up_to_100() {
        let g = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        for k in 1..=100 {
            let bound_ratio = ((4.0 * k as f64 + 1.0) / (4.0 * k as f64 + 2.0)).sqrt();
            let bound = (PI / bound_ratio.acos()).ceil() as usize;
            let d = optimal_disks(&g, k).unwrap();
            for i in 0..k {
                let (rp, r) = (d.annulus_radii(i).0, d.radii()[i]);
                let n = vertex_count_for_annulus(rp, r);
                assert!(n <= bound, "k={k} i={i}: n'={n} > bound {bound}");
            }
        }
    }

    #[test]
    fn scale_equivariance() {
        let g1 = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let g3 = Gaussian::new(Point::new(0.0, 0.0), 3.0).unwrap();
        let d1 = optimal_disks(&g1, 5).unwrap();
        let d3 = optimal_disks(&g3, 5).unwrap();
        for i in 0..5 {
            assert!((d3.radii()[i] - 3.0 * d1.radii()[i]).abs() < 1e-12);
            assert!((d3.weights()[i] - d1.weights()[i] / 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn weighted_mass_scale_invariant() {
        let g1 = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let g3 = Gaussian::new(Point::new(1.0, 2.0), 3.0).unwrap();
        let m1 = polygonize(&optimal_disks(&g1, 3).unwrap()).weighted_mass();
        let m3 = polygonize(&optimal_disks(&g3, 3).unwrap()).weighted_mass();
        assert!((m1 - m3).abs() < 1e-12);
        assert!(m1 < 1.0);
    }
}
