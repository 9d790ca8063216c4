//! Visibility probability between imprecise points among polygonal obstacles.
//!
//! The library has two halves that compose into one pipeline:
//!
//! * **Region-based approximation of a Gaussian.** An isotropic 2-D Gaussian
//!   density is approximated by `k` weighted concentric disks (a cylindrical
//!   step function, optimal in symmetric-difference volume, all in closed
//!   form), then refined into `2k` weighted regular polygons inscribed in
//!   annuli around each disk so that downstream machinery only ever sees
//!   straight edges. See [`gaussian`].
//!
//! * **Exact uniform-pair visibility.** For two disjoint convex polygons
//!   separated by a vertical line and convex obstacles confined to the slab
//!   between them, the probability that two uniform random points see each
//!   other is computed exactly: lines are mapped to dual points
//!   `(alpha, beta)` with `y = alpha x - beta`, the region of lines stabbing
//!   both polygons is partitioned into cells crossing a fixed edge quadruple,
//!   obstacle "hourglasses" mark blocked cells, and each cell's mass is a
//!   closed-form integral over vertical splines. See [`arrangement`],
//!   [`integrate`], and [`engine`].
//!
//! Composing the two: each polygon pair from the two approximations
//! contributes its weighted visibility mass, yielding an
//! epsilon-approximation of the Gaussian-to-Gaussian visibility probability
//! ([`engine::gaussian_visibility`]).
//!
//! Every probability the analytic engine produces has an independent
//! Monte-Carlo estimator in [`mc`] used as a cross-check and as the only
//! route for configurations outside the analytic engine's scope (overlapping
//! regions, polygons with holes).

pub mod arrangement;
pub mod engine;
pub mod gaussian;
pub mod geom;
pub mod integrate;
pub mod mc;
pub mod scene;
pub mod svg;

pub use engine::{
    gaussian_visibility, uniform_pair_probability, EngineConfig, EngineError, ProbabilityResult,
};
pub use gaussian::{optimal_disks, polygonize, DiskApproximation, Gaussian, PolygonApproximation};
pub use geom::{ConvexPolygon, DualPoint, LineCoefficients, Point, Segment, WeightedRegionSet};
pub use mc::McEstimate;
pub use scene::{Scene, SceneFile, Source};
