//! Shared oracle machinery for the integration suites.
//!
//! Everything here is deliberately independent of the library's analytic
//! paths: quadrature is plain adaptive Simpson on raw integrands, the
//! minimizer is generic Nelder-Mead plus coordinate polish, and scene
//! generation uses its own seeded RNG.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use visprob_core::geom::{ConvexPolygon, Point};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------
// adaptive quadrature oracles
// ---------------------------------------------------------------------

fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let s2 = left + right;
    if depth == 0 || (s2 - whole).abs() <= 15.0 * tol {
        s2 + (s2 - whole) / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_quad(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol.max(1e-300), 30)
}

/// Adaptive quadrature split at the given interior breakpoints.
pub fn adaptive_quad_with_breaks(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> f64 {
    let mut pts = vec![a];
    for &x in breaks {
        if x > a && x < b {
            pts.push(x);
        }
    }
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let per = tol / (pts.len() - 1) as f64;
    pts.windows(2)
        .map(|w| adaptive_quad(f, w[0], w[1], per))
        .sum()
}

/// Nested adaptive 2-D quadrature of `g(alpha, beta)` over the trapezoid
/// `alpha in [a1, a2]`, `beta in [lo(alpha), hi(alpha)]`.
pub fn adaptive_quad_2d(
    g: &dyn Fn(f64, f64) -> f64,
    a1: f64,
    a2: f64,
    lo: &dyn Fn(f64) -> f64,
    hi: &dyn Fn(f64) -> f64,
    tol: f64,
) -> f64 {
    let outer = |alpha: f64| -> f64 {
        let l = lo(alpha);
        let h = hi(alpha);
        if !(h > l) {
            return 0.0;
        }
        adaptive_quad(&|beta| g(alpha, beta), l, h, tol * 1e-3)
    };
    adaptive_quad(&outer, a1, a2, tol)
}

// ---------------------------------------------------------------------
// generic minimizer (Nelder-Mead + coordinate polish)
// ---------------------------------------------------------------------

/// Generic Nelder-Mead followed by cyclic golden-section coordinate polish.
/// Penalized objectives are fine; returns the best point found.
pub fn minimize(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    initial_step: f64,
    iters: usize,
) -> Vec<f64> {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += initial_step * (1.0 + 0.3 * (i as f64 % 3.0));
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    for _ in 0..iters {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let best = idx[0];
        let worst = idx[n];
        let second_worst = idx[n - 1];
        if (values[worst] - values[best]).abs()
            <= 1e-14 * (values[best].abs() + 1e-12)
        {
            break;
        }
        let mut centroid = vec![0.0; n];
        for &i in idx.iter().take(n) {
            for d in 0..n {
                centroid[d] += simplex[i][d] / n as f64;
            }
        }
        let blend = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|d| centroid[d] + t * (simplex[worst][d] - centroid[d]))
                .collect()
        };
        let reflected = blend(-1.0);
        let fr = f(&reflected);
        if fr < values[best] {
            let expanded = blend(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = blend(0.5);
            let fc = f(&contracted);
            if fc < values[worst] {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // shrink toward best
                let best_pt = simplex[best].clone();
                for i in 0..=n {
                    if i == best {
                        continue;
                    }
                    for d in 0..n {
                        simplex[i][d] = best_pt[d] + 0.5 * (simplex[i][d] - best_pt[d]);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    let mut point = simplex[best].clone();

    // cyclic golden-section polish
    let golden = 0.618_033_988_749_894_8;
    for sweep in 0..60 {
        let radius = initial_step * 0.5f64.powi((sweep / n.max(1)) as i32 + 1);
        let mut moved = false;
        for d in 0..n {
            let mut lo = point[d] - radius;
            let mut hi = point[d] + radius;
            let mut x1 = hi - golden * (hi - lo);
            let mut x2 = lo + golden * (hi - lo);
            let eval = |x: f64, p: &[f64]| {
                let mut q = p.to_vec();
                q[d] = x;
                f(&q)
            };
            let mut f1 = eval(x1, &point);
            let mut f2 = eval(x2, &point);
            for _ in 0..50 {
                if f1 < f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - golden * (hi - lo);
                    f1 = eval(x1, &point);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + golden * (hi - lo);
                    f2 = eval(x2, &point);
                }
            }
            let cand = if f1 < f2 { x1 } else { x2 };
            let fc = if f1 < f2 { f1 } else { f2 };
            if fc < f(&point) {
                point[d] = cand;
                moved = true;
            }
        }
        if !moved && sweep > 10 {
            break;
        }
    }
    point
}

// ---------------------------------------------------------------------
// random geometry
// ---------------------------------------------------------------------

/// Convex hull (monotone chain) of a point set; counter-clockwise.
pub fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|p, q| (p.x, p.y).partial_cmp(&(q.x, q.y)).unwrap());
    pts.dedup_by(|a, b| a == b);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| {
        (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
    };
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Random convex polygon with 3..=8 vertices inside a disk.
pub fn random_convex_polygon(rng: &mut ChaCha8Rng, center: Point, radius: f64) -> ConvexPolygon {
    loop {
        let pts: Vec<Point> = (0..8)
            .map(|_| {
                let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let r: f64 = radius * rng.gen_range(0.35_f64..1.0).sqrt();
                Point::new(center.x + r * ang.cos(), center.y + r * ang.sin())
            })
            .collect();
        let hull = convex_hull(pts);
        if hull.len() >= 3 {
            if let Ok(poly) = ConvexPolygon::new(hull) {
                return poly;
            }
        }
    }
}

/// A random case-1 scene: two convex sources separated by a vertical slab
/// with 1..=5 disjoint convex obstacles strictly inside the slab.
pub struct RandomScene {
    pub p1: ConvexPolygon,
    pub p2: ConvexPolygon,
    pub obstacles: Vec<ConvexPolygon>,
}

pub fn random_scene(rng: &mut ChaCha8Rng, max_obstacles: usize) -> RandomScene {
    let p1 = loop {
        let p = random_convex_polygon(rng, Point::new(-2.2, rng.gen_range(-0.5..0.5)), 1.2);
        if p.x_max() < -0.9 {
            break p;
        }
    };
    let p2 = loop {
        let p = random_convex_polygon(rng, Point::new(2.2, rng.gen_range(-0.5..0.5)), 1.2);
        if p.x_min() > 0.9 {
            break p;
        }
    };
    let want = rng.gen_range(1..=max_obstacles.max(1));
    let mut obstacles: Vec<ConvexPolygon> = Vec::new();
    let mut attempts = 0;
    while obstacles.len() < want && attempts < 200 {
        attempts += 1;
        let c = Point::new(rng.gen_range(-0.55..0.55), rng.gen_range(-1.4..1.4));
        let o = random_convex_polygon(rng, c, 0.28);
        if o.x_min() <= -0.88 || o.x_max() >= 0.88 {
            continue;
        }
        if obstacles.iter().all(|e| e.disjoint_from(&o, 1e-9)) {
            obstacles.push(o);
        }
    }
    RandomScene { p1, p2, obstacles }
}

/// Least-squares slope of `log(y)` against `log(x)`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..xs.len() {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    num / den
}
