//! Assembles per-cell masses into visibility probabilities and composes
//! Gaussian approximations into the end-to-end pipeline.
//!
//! The uniform-pair probability is the ratio of two sums of cell masses:
//! the denominator sums every cell of the stabbing region, the numerator
//! only the cells no obstacle hourglass touches. The denominator equals
//! `area(P1) * area(P2)` (the substitution back to primal coordinates),
//! which the test suites use as an identity check.
//!
//! Gaussian-to-Gaussian visibility splits the error budget evenly between
//! the two sources, approximates each by `2k` weighted polygons with
//! `k = ceil(1/(e^{eps/2}-1))`, and sums `w_i A_i w_j A_j P(Q_i, R_j)` over
//! all polygon pairs. The weighted masses sum to slightly below one, which
//! biases the estimate low by at most the approximation error; renormalizing
//! by the captured masses is available but off by default.

use rayon::prelude::*;
use thiserror::Error;

use crate::arrangement::{self, ArrangementError};
use crate::gaussian::{self, ApproxError, Gaussian, PolygonApproximation};
use crate::geom::{CompensatedSum, ConvexPolygon, GeomError};
use crate::integrate::{spline_mass_guarded, EdgeQuadruple};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("source polygons are not separable by a vertical line")]
    NotSeparable,
    #[error("obstacle {index} is not strictly inside the vertical slab between the sources")]
    ObstacleOutsideSlab { index: usize },
    #[error("obstacles {0} and {1} overlap")]
    ObstaclesOverlap(usize, usize),
    #[error("denominator below 1e-18: sources have no usable stabbing mass")]
    DegenerateDenominator,
    #[error("polygon pair ({0}, {1}) violates case-1 preconditions: {2}")]
    RegionsNotSeparable(usize, usize, String),
    #[error("cell classification failed: {0}")]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Clone, Copy, Debug)]
pub struct EngineConfig {
    /// Incidence tolerance in scene units.
    pub tolerance: f64,
    /// Divide the composite probability by the captured masses.
    pub renormalize: bool,
    /// Fraction of epsilon assigned to the first Gaussian (0.5 = even).
    pub epsilon_split: f64,
    /// Record the per-cell mass breakdown in results.
    pub collect_cells: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            tolerance: crate::geom::DEFAULT_TOLERANCE,
            renormalize: false,
            epsilon_split: 0.5,
            collect_cells: false,
        }
    }
}

/// Mass of one arrangement cell.
#[derive(Clone, Copy, Debug)]
pub struct CellMass {
    pub index: usize,
    pub blocked: bool,
    pub mass: f64,
    pub splines: usize,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Diagnostics {
    pub cell_count: usize,
    pub blocked_cells: usize,
    /// Faces of the full restricted arrangement, including those outside L*.
    pub total_faces: usize,
    /// Splines where the closed form was replaced by adaptive quadrature.
    pub quadrature_fallbacks: usize,
}

/// Numerator, denominator, and their ratio for one polygon pair.
#[derive(Clone, Debug)]
pub struct ProbabilityResult {
    pub probability: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// Per-cell breakdown (populated when `collect_cells` is set).
    pub cells: Vec<CellMass>,
    pub diagnostics: Diagnostics,
}

fn validate_obstacles(obstacles: &[ConvexPolygon], tol: f64) -> Result<(), EngineError> {
    for i in 0..obstacles.len() {
        for j in i + 1..obstacles.len() {
            if !obstacles[i].disjoint_from(&obstacles[j], tol) {
                return Err(EngineError::ObstaclesOverlap(i, j));
            }
        }
    }
    Ok(())
}

/// Probability that uniform random points of `p1` and `p2` see each other
/// among `obstacles`, computed exactly via the dual arrangement.
///
/// Case-1 preconditions: the sources are disjoint and separable by a
/// vertical line (either order), and every obstacle lies strictly inside
/// the vertical slab between them.
pub fn uniform_pair_probability(
    p1: &ConvexPolygon,
    p2: &ConvexPolygon,
    obstacles: &[ConvexPolygon],
    cfg: &EngineConfig,
) -> Result<ProbabilityResult, EngineError> {
    validate_obstacles(obstacles, cfg.tolerance)?;
    let (left, right) = if p1.x_max() < p2.x_min() {
        (p1, p2)
    } else if p2.x_max() < p1.x_min() {
        (p2, p1)
    } else {
        return Err(EngineError::NotSeparable);
    };
    let arr = match arrangement::build_arrangement(left, right, obstacles, cfg.tolerance) {
        Ok(a) => a,
        Err(ArrangementError::NotSeparable) => return Err(EngineError::NotSeparable),
        Err(ArrangementError::ObstacleOutsideSlab { index }) => {
            return Err(EngineError::ObstacleOutsideSlab { index })
        }
        Err(e) => return Err(EngineError::Arrangement(e)),
    };

    let per_cell: Vec<(f64, usize, usize)> = arr
        .cells
        .par_iter()
        .map(|cell| {
            let quad = EdgeQuadruple::new(cell.lines);
            let splines = arrangement::decompose_cell(&cell.polygon);
            let mut acc = CompensatedSum::new();
            let mut fallbacks = 0usize;
            for s in &splines {
                let (mass, fell_back) = spline_mass_guarded(s, &quad);
                if fell_back {
                    fallbacks += 1;
                }
                acc.add(mass);
            }
            (acc.total(), fallbacks, splines.len())
        })
        .collect();

    let mut numerator = CompensatedSum::new();
    let mut denominator = CompensatedSum::new();
    let mut fallbacks = 0usize;
    let mut cells = Vec::new();
    for (idx, ((mass, fb, nsplines), cell)) in per_cell.iter().zip(&arr.cells).enumerate() {
        denominator.add(*mass);
        if !cell.blocked {
            numerator.add(*mass);
        }
        fallbacks += fb;
        if cfg.collect_cells {
            cells.push(CellMass {
                index: idx,
                blocked: cell.blocked,
                mass: *mass,
                splines: *nsplines,
            });
        }
    }
    let denominator = denominator.total();
    let numerator = numerator.total();
    if denominator < 1e-18 {
        return Err(EngineError::DegenerateDenominator);
    }
    Ok(ProbabilityResult {
        probability: numerator / denominator,
        numerator,
        denominator,
        cells,
        diagnostics: Diagnostics {
            cell_count: arr.diagnostics.cell_count,
            blocked_cells: arr.diagnostics.blocked_cells,
            total_faces: arr.diagnostics.total_faces,
            quadrature_fallbacks: fallbacks,
        },
    })
}

/// Sum of all cell masses with no obstacles; equals
/// `area(p1) * area(p2)` up to floating-point error.
pub fn denominator_identity_check(
    p1: &ConvexPolygon,
    p2: &ConvexPolygon,
    cfg: &EngineConfig,
) -> Result<f64, EngineError> {
    Ok(uniform_pair_probability(p1, p2, &[], cfg)?.denominator)
}

/// Total probability mass carried by a polygon approximation:
/// `sum_i (w_i/2)(area(inner_i) + area(outer_i))`.
pub fn weighted_mass(m: &PolygonApproximation) -> f64 {
    m.weighted_mass()
}

/// Composite result of the Gaussian-to-Gaussian pipeline.
#[derive(Clone, Debug)]
pub struct GaussianVisibilityResult {
    pub probability: f64,
    /// Disk counts `k` used per source.
    pub k: (usize, usize),
    /// `sum w_i area_i` per source (the mass the approximation captures).
    pub captured_mass: (f64, f64),
    pub pair_count: usize,
    pub renormalized: bool,
    pub diagnostics: Diagnostics,
}

/// Epsilon-approximate probability that two Gaussian-distributed points see
/// each other among `obstacles`.
///
/// The error budget is split between the sources per
/// `cfg.epsilon_split`; each Gaussian becomes `2k` weighted polygons, and
/// every cross-source polygon pair must satisfy the case-1 preconditions.
pub fn gaussian_visibility(
    g1: &Gaussian,
    g2: &Gaussian,
    obstacles: &[ConvexPolygon],
    eps: f64,
    cfg: &EngineConfig,
) -> Result<GaussianVisibilityResult, EngineError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(EngineError::Approx(ApproxError::NonPositiveEpsilon));
    }
    let split = cfg.epsilon_split.clamp(1e-6, 1.0 - 1e-6);
    let k1 = gaussian::k_for_epsilon(eps * split)?;
    let k2 = gaussian::k_for_epsilon(eps * (1.0 - split))?;
    let m1 = gaussian::polygonize(&gaussian::optimal_disks(g1, k1)?);
    let m2 = gaussian::polygonize(&gaussian::optimal_disks(g2, k2)?);
    let left: Vec<(ConvexPolygon, f64)> = m1
        .weighted_polygons()
        .map(|(p, w)| (p.clone(), w * p.area()))
        .collect();
    let right: Vec<(ConvexPolygon, f64)> = m2
        .weighted_polygons()
        .map(|(p, w)| (p.clone(), w * p.area()))
        .collect();

    let composite = composite_visibility(&left, &right, obstacles, cfg)?;
    let mass1: f64 = left.iter().map(|(_, m)| m).sum();
    let mass2: f64 = right.iter().map(|(_, m)| m).sum();
    let probability = if cfg.renormalize {
        composite.0 / (mass1 * mass2)
    } else {
        composite.0
    };
    Ok(GaussianVisibilityResult {
        probability,
        k: (k1, k2),
        captured_mass: (mass1, mass2),
        pair_count: left.len() * right.len(),
        renormalized: cfg.renormalize,
        diagnostics: composite.1,
    })
}

/// Weighted sum of pair visibilities over two families of weighted
/// polygons: `sum_{i,j} mass_i mass_j P(see | Q_i, R_j)`.
pub fn composite_visibility(
    left: &[(ConvexPolygon, f64)],
    right: &[(ConvexPolygon, f64)],
    obstacles: &[ConvexPolygon],
    cfg: &EngineConfig,
) -> Result<(f64, Diagnostics), EngineError> {
    validate_obstacles(obstacles, cfg.tolerance)?;
    for (i, (q, _)) in left.iter().enumerate() {
        for (j, (r, _)) in right.iter().enumerate() {
            if !(q.x_max() < r.x_min() || r.x_max() < q.x_min()) {
                return Err(EngineError::RegionsNotSeparable(
                    i,
                    j,
                    "not separable by a vertical line".into(),
                ));
            }
        }
    }
    let pair_cfg = EngineConfig {
        collect_cells: false,
        ..*cfg
    };
    let pairs: Vec<(usize, usize)> = (0..left.len())
        .flat_map(|i| (0..right.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<(f64, Diagnostics), EngineError>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (q, mq) = &left[i];
            let (r, mr) = &right[j];
            match uniform_pair_probability(q, r, obstacles, &pair_cfg) {
                Ok(res) => Ok((mq * mr * res.probability, res.diagnostics)),
                Err(EngineError::NotSeparable) => Err(EngineError::RegionsNotSeparable(
                    i,
                    j,
                    "not separable by a vertical line".into(),
                )),
                Err(EngineError::ObstacleOutsideSlab { index }) => {
                    Err(EngineError::RegionsNotSeparable(
                        i,
                        j,
                        format!("obstacle {index} is outside the pair's vertical slab"),
                    ))
                }
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut total = CompensatedSum::new();
    let mut diag = Diagnostics::default();
    for r in results {
        let (mass, d) = r?;
        total.add(mass);
        diag.cell_count += d.cell_count;
        diag.blocked_cells += d.blocked_cells;
        diag.total_faces += d.total_faces;
        diag.quadrature_fallbacks += d.quadrature_fallbacks;
    }
    Ok((total.total(), diag))
}

/// Deterministic synthetic scene with exactly `n` vertices in total: two
/// regular source polygons and a column of small obstacles in the slab
/// between them. Used by the scaling benchmark.
pub fn synthetic_scaling_scene(n: usize) -> (ConvexPolygon, ConvexPolygon, Vec<ConvexPolygon>) {
    use crate::gaussian::regular_polygon;
    use crate::geom::Point;

    let mut n_src = (n / 4).max(3);
    let mut rem = n.saturating_sub(2 * n_src);
    if rem < 3 {
        n_src += rem / 2;
        rem = n.saturating_sub(2 * n_src);
    }
    let mut obstacle_sizes: Vec<usize> = Vec::new();
    let mut left = rem;
    while left >= 3 {
        let take = if left >= 10 {
            4
        } else if left >= 7 {
            left - 3
        } else {
            left
        };
        obstacle_sizes.push(take);
        left -= take;
    }
    let count = obstacle_sizes.len();
    let mut i = 0;
    while left > 0 && count > 0 {
        obstacle_sizes[i % count] += 1;
        left -= 1;
        i += 1;
    }
    if left > 0 {
        n_src += left.div_ceil(2);
    }

    let p1 = regular_polygon(Point::new(-4.0, 0.0), n_src, 1.5, 0.15);
    let p2 = regular_polygon(Point::new(4.0, 0.0), n_src, 1.5, 0.35);
    let obstacles: Vec<ConvexPolygon> = obstacle_sizes
        .iter()
        .enumerate()
        .map(|(idx, &sz)| {
            let y = 1.1 * (idx as f64 - (count as f64 - 1.0) / 2.0);
            regular_polygon(Point::new(0.0, y), sz, 0.35, 0.4)
        })
        .collect();
    (p1, p2, obstacles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn square(x0: f64, y0: f64, x1: f64, y1: f64) -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
        .unwrap()
    }

    #[test]
    fn no_obstacles_probability_is_one() {
        let cfg = EngineConfig::default();
        let r = uniform_pair_probability(
            &square(0.0, 0.0, 1.0, 1.0),
            &square(3.0, 0.0, 4.0, 1.0),
            &[],
            &cfg,
        )
        .unwrap();
        assert_eq!(r.probability, 1.0);
        assert!((r.denominator - 1.0).abs() < 1e-9, "{}", r.denominator);
    }

    #[test]
    fn full_wall_probability_is_zero() {
        let cfg = EngineConfig::default();
        let r = uniform_pair_probability(
            &square(0.0, 0.0, 1.0, 1.0),
            &square(3.0, 0.0, 4.0, 1.0),
            &[square(1.9, -10.0, 2.1, 11.0)],
            &cfg,
        )
        .unwrap();
        assert_eq!(r.probability, 0.0);
    }

    #[test]
    fn denominator_is_area_product() {
        let cfg = EngineConfig::default();
        let d = denominator_identity_check(
            &square(0.0, 0.0, 1.0, 1.0),
            &square(3.0, -1.0, 5.0, 0.0),
            &cfg,
        )
        .unwrap();
        // 1 x 1 square times 2 x 1 rectangle
        assert!((d - 2.0).abs() < 2.0 * 1e-9, "{d}");
    }

    #[test]
    fn denominator_scales_as_fourth_power() {
        let cfg = EngineConfig::default();
        let p1 = square(0.0, 0.0, 1.0, 1.0);
        let p2 = square(3.0, 0.0, 4.0, 1.0);
        let d1 = denominator_identity_check(&p1, &p2, &cfg).unwrap();
        let s = 2.0;
        let d2 = denominator_identity_check(&p1.scaled(s), &p2.scaled(s), &cfg).unwrap();
        assert!((d2 / d1 - s.powi(4)).abs() < 1e-6, "{}", d2 / d1);
    }

    #[test]
    fn swapped_sources_give_same_probability() {
        let cfg = EngineConfig::default();
        let p1 = square(0.0, 0.0, 1.0, 1.0);
        let p2 = square(3.0, 0.0, 4.0, 1.0);
        let obs = [square(1.8, 0.2, 2.2, 0.9)];
        let a = uniform_pair_probability(&p1, &p2, &obs, &cfg).unwrap();
        let b = uniform_pair_probability(&p2, &p1, &obs, &cfg).unwrap();
        assert!((a.probability - b.probability).abs() < 1e-12);
    }

    #[test]
    fn not_separable_is_reported() {
        let cfg = EngineConfig::default();
        let p1 = square(0.0, 0.0, 2.0, 1.0);
        let p2 = square(1.5, 2.0, 3.5, 3.0);
        assert!(matches!(
            uniform_pair_probability(&p1, &p2, &[], &cfg),
            Err(EngineError::NotSeparable)
        ));
    }

    #[test]
    fn overlapping_obstacles_rejected() {
        let cfg = EngineConfig::default();
        let p1 = square(0.0, 0.0, 1.0, 1.0);
        let p2 = square(5.0, 0.0, 6.0, 1.0);
        let obs = [square(2.0, 0.0, 3.0, 1.0), square(2.5, 0.5, 3.5, 1.5)];
        assert!(matches!(
            uniform_pair_probability(&p1, &p2, &obs, &cfg),
            Err(EngineError::ObstaclesOverlap(0, 1))
        ));
    }

    #[test]
    fn small_obstacle_blocks_some_mass() {
        let cfg = EngineConfig::default();
        let r = uniform_pair_probability(
            &square(0.0, 0.0, 1.0, 1.0),
            &square(3.0, 0.0, 4.0, 1.0),
            &[square(1.9, 0.45, 2.1, 0.55)],
            &cfg,
        )
        .unwrap();
        assert!(r.probability > 0.0 && r.probability < 1.0, "{}", r.probability);
    }

    #[test]
    fn far_gaussians_no_obstacles_equal_mass_product() {
        let cfg = EngineConfig::default();
        let g1 = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let g2 = Gaussian::new(Point::new(100.0, 0.0), 1.0).unwrap();
        let r = gaussian_visibility(&g1, &g2, &[], 0.2, &cfg).unwrap();
        let expected = r.captured_mass.0 * r.captured_mass.1;
        assert!((r.probability - expected).abs() < 1e-9);
        let deficit = 1.0 - expected;
        assert!(r.probability <= 1.0 && r.probability >= 1.0 - deficit - 1e-12);
        // renormalized variant reports exactly 1
        let cfg_rn = EngineConfig {
            renormalize: true,
            ..cfg
        };
        let rn = gaussian_visibility(&g1, &g2, &[], 0.2, &cfg_rn).unwrap();
        assert!((rn.probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gaussians_with_full_wall_see_nothing() {
        let cfg = EngineConfig::default();
        let g1 = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let g2 = Gaussian::new(Point::new(20.0, 0.0), 1.0).unwrap();
        let wall = square(9.5, -200.0, 10.5, 200.0);
        let r = gaussian_visibility(&g1, &g2, &[wall], 0.3, &cfg).unwrap();
        assert_eq!(r.probability, 0.0);
    }

    #[test]
    fn too_close_gaussians_report_failing_pair() {
        let cfg = EngineConfig::default();
        let g1 = Gaussian::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let g2 = Gaussian::new(Point::new(1.0, 0.0), 1.0).unwrap();
        assert!(matches!(
            gaussian_visibility(&g1, &g2, &[], 0.5, &cfg),
            Err(EngineError::RegionsNotSeparable(_, _, _))
        ));
    }
}
