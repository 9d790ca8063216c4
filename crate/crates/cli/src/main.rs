//! `visprob`: visibility probabilities between imprecise points among
//! polygonal obstacles.
//!
//! Subcommands:
//! * `approx`     - approximate a scene's Gaussian source by weighted disks
//!                  or regular polygons (closed forms), report radii,
//!                  weights, vertex counts, and the error bound.
//! * `prob`       - compute the probability that the two sources see each
//!                  other, analytically (dual arrangement + closed-form
//!                  integration), by Monte Carlo, or both with a z-score.
//! * `convexity`  - Monte-Carlo degree of convexity of a polygon with holes.
//! * `bench`      - synthetic scaling scenes; CSV of size, cell count, time.
//!
//! Exit codes: 0 success, 2 invalid input, 3 analytic preconditions unmet
//! (the error suggests `--mode mc`), 4 numerical failure.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use visprob_core::engine::{self, EngineConfig, EngineError};
use visprob_core::gaussian;
use visprob_core::geom::ConvexPolygon;
use visprob_core::mc::{self, McEstimate, SourceSampler};
use visprob_core::scene::{PolygonWithHolesFile, Scene, SceneFile, Source};
use visprob_core::svg;

#[derive(Parser)]
#[command(name = "visprob", version, about = "Visibility probability between imprecise points among obstacles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate the scene's first (Gaussian) source by weighted regions
    Approx(ApproxArgs),
    /// Probability that the two sources see each other
    Prob(ProbArgs),
    /// Degree of convexity of a polygon with holes (Monte Carlo)
    Convexity(ConvexityArgs),
    /// Quadratic-scaling benchmark over synthetic scenes
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Shape {
    Disks,
    Polygons,
}

#[derive(Args)]
struct ApproxArgs {
    /// Scene JSON file; source 1 must be a Gaussian
    #[arg(long)]
    scene: String,
    /// Number of disks (mutually exclusive with --epsilon)
    #[arg(long, conflicts_with = "epsilon")]
    k: Option<usize>,
    /// Error budget; picks k = ceil(1/(e^eps - 1))
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value = "disks")]
    shape: Shape,
    /// Write an SVG rendering here
    #[arg(long)]
    svg: Option<String>,
    /// Write the full JSON report here
    #[arg(long)]
    json: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Analytic,
    Mc,
    Both,
}

#[derive(Args)]
struct ProbArgs {
    #[arg(long)]
    scene: String,
    #[arg(long, value_enum, default_value = "analytic")]
    mode: Mode,
    /// Monte-Carlo sample count
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Renormalize composite results by the captured masses
    #[arg(long)]
    renormalize: bool,
    #[arg(long)]
    svg: Option<String>,
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct ConvexityArgs {
    /// Polygon-with-holes JSON file: {"outer": {...}, "holes": [...]}
    #[arg(long)]
    polygon: String,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated total vertex counts
    #[arg(long, default_value = "8,16,32,64,128", value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    /// Write the CSV here (also printed to stdout)
    #[arg(long)]
    csv: Option<String>,
}

enum CliError {
    Input(String),
    Preconditions(String),
    Numerical(String),
}

impl CliError {
    fn report(&self) -> ExitCode {
        let (code, msg) = match self {
            CliError::Input(m) => (2, m),
            CliError::Preconditions(m) => (3, m),
            CliError::Numerical(m) => (4, m),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

fn engine_error(e: EngineError) -> CliError {
    match e {
        EngineError::NotSeparable
        | EngineError::ObstacleOutsideSlab { .. }
        | EngineError::ObstaclesOverlap(..)
        | EngineError::RegionsNotSeparable(..) => CliError::Preconditions(format!(
            "{e}; the analytic engine needs a case-1 scene, try --mode mc"
        )),
        EngineError::Approx(inner) => CliError::Input(inner.to_string()),
        EngineError::Geom(inner) => CliError::Input(inner.to_string()),
        other => CliError::Numerical(other.to_string()),
    }
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn write_file(path: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn load_scene(path: &str) -> Result<Scene, CliError> {
    let file = SceneFile::from_json(&read_file(path)?).map_err(|e| CliError::Input(e.to_string()))?;
    file.validate().map_err(|e| CliError::Input(e.to_string()))
}

fn config_from_env() -> EngineConfig {
    let mut cfg = EngineConfig::default();
    if let Ok(v) = std::env::var("VISPROB_TOLERANCE") {
        if let Ok(tol) = v.parse::<f64>() {
            if tol.is_finite() && tol > 0.0 {
                cfg.tolerance = tol;
            }
        }
    }
    cfg
}

#[derive(Serialize)]
struct DiskReport {
    radius: f64,
    weight: f64,
    crossover: f64,
}

#[derive(Serialize)]
struct PairReport {
    inner_vertices: usize,
    outer_vertices: usize,
    inner_circumradius: f64,
    outer_circumradius: f64,
    weight_each: f64,
}

#[derive(Serialize)]
struct ApproxReport {
    k: usize,
    sigma: f64,
    center: [f64; 2],
    error_bound: f64,
    disks: Vec<DiskReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polygons: Option<Vec<PairReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    captured_mass: Option<f64>,
}

fn cmd_approx(args: &ApproxArgs) -> Result<(), CliError> {
    let scene = load_scene(&args.scene)?;
    let g = match &scene.sources[0] {
        Source::Gaussian(g) => *g,
        Source::Polygon(_) => {
            return Err(CliError::Input(
                "approx needs a Gaussian as source 1".into(),
            ))
        }
    };
    let k = match (args.k, args.epsilon.or(scene.epsilon)) {
        (Some(k), _) if k >= 1 => k,
        (Some(_), _) => return Err(CliError::Input("--k must be at least 1".into())),
        (None, Some(eps)) => {
            gaussian::k_for_epsilon(eps).map_err(|e| CliError::Input(e.to_string()))?
        }
        (None, None) => {
            return Err(CliError::Input(
                "provide --k or --epsilon (or an epsilon field in the scene)".into(),
            ))
        }
    };
    let disks = gaussian::optimal_disks(&g, k).map_err(|e| CliError::Input(e.to_string()))?;
    let mut report = ApproxReport {
        k,
        sigma: g.sigma,
        center: [g.center.x, g.center.y],
        error_bound: gaussian::disk_error(k),
        disks: (0..k)
            .map(|i| DiskReport {
                radius: disks.radii()[i],
                weight: disks.weights()[i],
                crossover: disks.crossovers()[i],
            })
            .collect(),
        polygons: None,
        captured_mass: None,
    };
    let mut svg_out = None;
    match args.shape {
        Shape::Disks => {
            if args.svg.is_some() {
                svg_out = Some(svg::render_disks(&disks));
            }
            println!(
                "k = {k}, error bound = {:.6}, radii {:.6}..{:.6}",
                report.error_bound,
                disks.radii()[0],
                disks.radii()[k - 1]
            );
        }
        Shape::Polygons => {
            let poly = gaussian::polygonize(&disks);
            report.polygons = Some(
                poly.pairs()
                    .iter()
                    .map(|p| PairReport {
                        inner_vertices: p.inner_vertex_count,
                        outer_vertices: p.outer_vertex_count,
                        inner_circumradius: disks.radii()[0].max(0.0),
                        outer_circumradius: poly.max_circumradius(),
                        weight_each: p.weight_each,
                    })
                    .collect(),
            );
            // per-pair circumradii
            if let Some(pairs) = report.polygons.as_mut() {
                for (i, pr) in pairs.iter_mut().enumerate() {
                    pr.inner_circumradius = disks.radii()[i];
                    pr.outer_circumradius = disks.annulus_radii(i).1;
                }
            }
            report.captured_mass = Some(poly.weighted_mass());
            if args.svg.is_some() {
                svg_out = Some(svg::render_polygons(&poly));
            }
            let counts: Vec<String> = poly
                .pairs()
                .iter()
                .map(|p| format!("{}+{}", p.inner_vertex_count, p.outer_vertex_count))
                .collect();
            println!(
                "k = {k}, error bound = {:.6}, vertex counts [{}], captured mass {:.6}",
                report.error_bound,
                counts.join(", "),
                report.captured_mass.unwrap()
            );
        }
    }
    if let Some(path) = &args.svg {
        write_file(path, svg_out.as_deref().unwrap_or(""))?;
    }
    if let Some(path) = &args.json {
        write_file(
            path,
            &serde_json::to_string_pretty(&report).expect("report serializes"),
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct McReport {
    mean: f64,
    half_width_95: f64,
    samples: u64,
    seed: u64,
}

impl From<McEstimate> for McReport {
    fn from(e: McEstimate) -> Self {
        McReport {
            mean: e.mean,
            half_width_95: e.half_width_95,
            samples: e.samples,
            seed: e.seed,
        }
    }
}

#[derive(Serialize)]
struct ProbReport {
    mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numerator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    denominator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cells: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    blocked_cells: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quadrature_fallbacks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    captured_mass: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc: Option<McReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_score: Option<f64>,
}

/// Weighted polygon decomposition of a source for the analytic engine.
fn source_polygons(
    source: &Source,
    eps_share: Option<f64>,
) -> Result<Vec<(ConvexPolygon, f64)>, CliError> {
    match source {
        Source::Polygon(p) => Ok(vec![(p.clone(), 1.0)]),
        Source::Gaussian(g) => {
            let eps = eps_share.ok_or_else(|| {
                CliError::Input(
                    "scene has a Gaussian source but no epsilon (set \"epsilon\" in the scene file)"
                        .into(),
                )
            })?;
            let k = gaussian::k_for_epsilon(eps).map_err(|e| CliError::Input(e.to_string()))?;
            let disks =
                gaussian::optimal_disks(g, k).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(gaussian::polygonize(&disks)
                .weighted_polygons()
                .map(|(p, w)| (p.clone(), w * p.area()))
                .collect())
        }
    }
}

fn analytic_probability(
    scene: &Scene,
    cfg: &EngineConfig,
) -> Result<(ProbReport, Option<String>), CliError> {
    let started = Instant::now();
    let gaussians = scene
        .sources
        .iter()
        .filter(|s| matches!(s, Source::Gaussian(_)))
        .count();
    let share = |is_gaussian: bool| -> Option<f64> {
        if !is_gaussian {
            None
        } else {
            scene
                .epsilon
                .map(|e| if gaussians == 2 { e * 0.5 } else { e })
        }
    };
    let mut report = ProbReport {
        mode: "analytic".into(),
        probability: None,
        numerator: None,
        denominator: None,
        cells: None,
        blocked_cells: None,
        quadrature_fallbacks: None,
        captured_mass: None,
        elapsed_seconds: None,
        mc: None,
        z_score: None,
    };
    let mut svg_out = None;
    match (&scene.sources[0], &scene.sources[1]) {
        (Source::Polygon(p1), Source::Polygon(p2)) => {
            let r = engine::uniform_pair_probability(p1, p2, &scene.obstacles, cfg)
                .map_err(engine_error)?;
            report.probability = Some(r.probability);
            report.numerator = Some(r.numerator);
            report.denominator = Some(r.denominator);
            report.cells = Some(r.diagnostics.cell_count);
            report.blocked_cells = Some(r.diagnostics.blocked_cells);
            report.quadrature_fallbacks = Some(r.diagnostics.quadrature_fallbacks);
            let (left, right) = if p1.x_max() < p2.x_min() {
                (p1, p2)
            } else {
                (p2, p1)
            };
            if let Ok(arr) =
                visprob_core::arrangement::build_arrangement(left, right, &scene.obstacles, cfg.tolerance)
            {
                svg_out = Some(svg::render_dual(&arr));
            }
        }
        (a, b) => {
            let left = source_polygons(a, share(matches!(a, Source::Gaussian(_))))?;
            let right = source_polygons(b, share(matches!(b, Source::Gaussian(_))))?;
            let mass: (f64, f64) = (
                left.iter().map(|(_, m)| m).sum(),
                right.iter().map(|(_, m)| m).sum(),
            );
            let (mut p, diag) =
                engine::composite_visibility(&left, &right, &scene.obstacles, cfg)
                    .map_err(engine_error)?;
            if cfg.renormalize {
                p /= mass.0 * mass.1;
            }
            report.probability = Some(p);
            report.cells = Some(diag.cell_count);
            report.blocked_cells = Some(diag.blocked_cells);
            report.quadrature_fallbacks = Some(diag.quadrature_fallbacks);
            report.captured_mass = Some([mass.0, mass.1]);
            svg_out = Some(svg::render_scene(scene));
        }
    }
    report.elapsed_seconds = Some(started.elapsed().as_secs_f64());
    Ok((report, svg_out))
}

fn sampler_for(source: &Source) -> SourceSampler {
    match source {
        Source::Polygon(p) => SourceSampler::polygon(p),
        Source::Gaussian(g) => SourceSampler::gaussian(*g),
    }
}

fn cmd_prob(args: &ProbArgs) -> Result<(), CliError> {
    let scene = load_scene(&args.scene)?;
    let mut cfg = config_from_env();
    cfg.renormalize = args.renormalize;

    let mut report = None;
    let mut svg_out = None;
    if matches!(args.mode, Mode::Analytic | Mode::Both) {
        let (r, svg) = analytic_probability(&scene, &cfg)?;
        svg_out = svg;
        report = Some(r);
    }
    let mc_est = if matches!(args.mode, Mode::Mc | Mode::Both) {
        let s1 = sampler_for(&scene.sources[0]);
        let s2 = sampler_for(&scene.sources[1]);
        Some(mc::mc_source_pair(
            &s1,
            &s2,
            &scene.obstacles,
            args.samples,
            args.seed,
        ))
    } else {
        None
    };

    let mut report = report.unwrap_or(ProbReport {
        mode: String::new(),
        probability: None,
        numerator: None,
        denominator: None,
        cells: None,
        blocked_cells: None,
        quadrature_fallbacks: None,
        captured_mass: None,
        elapsed_seconds: None,
        mc: None,
        z_score: None,
    });
    report.mode = match args.mode {
        Mode::Analytic => "analytic",
        Mode::Mc => "mc",
        Mode::Both => "both",
    }
    .into();
    if let Some(est) = mc_est {
        if let Some(p) = report.probability {
            report.z_score = Some(est.z_score(p));
        }
        report.mc = Some(est.into());
    }

    match (&report.probability, &report.mc) {
        (Some(p), None) => {
            println!(
                "probability = {p:.9}  (cells {}, blocked {}, fallbacks {}, {:.3}s)",
                report.cells.unwrap_or(0),
                report.blocked_cells.unwrap_or(0),
                report.quadrature_fallbacks.unwrap_or(0),
                report.elapsed_seconds.unwrap_or(0.0),
            );
            if let (Some(n), Some(d)) = (report.numerator, report.denominator) {
                println!("numerator = {n:.12}, denominator = {d:.12}");
            }
        }
        (None, Some(m)) => {
            println!(
                "probability = {:.9} +- {:.9}  (mc, {} samples, seed {})",
                m.mean, m.half_width_95, m.samples, m.seed
            );
        }
        (Some(p), Some(m)) => {
            println!(
                "analytic = {p:.9}, mc = {:.9} +- {:.9}, z = {:.3}",
                m.mean,
                m.half_width_95,
                report.z_score.unwrap_or(f64::NAN)
            );
        }
        (None, None) => {}
    }

    if let Some(path) = &args.svg {
        write_file(path, svg_out.as_deref().unwrap_or(""))?;
    }
    if let Some(path) = &args.json {
        write_file(
            path,
            &serde_json::to_string_pretty(&report).expect("report serializes"),
        )?;
    }
    Ok(())
}

fn cmd_convexity(args: &ConvexityArgs) -> Result<(), CliError> {
    let file = PolygonWithHolesFile::from_json(&read_file(&args.polygon)?)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let poly = file.validate().map_err(|e| CliError::Input(e.to_string()))?;
    let est = mc::mc_degree_of_convexity(&poly, args.samples, args.seed);
    println!(
        "degree of convexity = {:.6} +- {:.6}  ({} samples, seed {})",
        est.mean, est.half_width_95, est.samples, est.seed
    );
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let cfg = config_from_env();
    let mut csv = String::from("n,vertices,cells,seconds\n");
    for &n in &args.sizes {
        let (p1, p2, obstacles) = engine::synthetic_scaling_scene(n);
        let actual =
            p1.len() + p2.len() + obstacles.iter().map(|o| o.len()).sum::<usize>();
        let mut cells = 0usize;
        let mut times = Vec::with_capacity(args.trials.max(1));
        for trial in 0..args.trials.max(1) {
            let t = Instant::now();
            let r = engine::uniform_pair_probability(&p1, &p2, &obstacles, &cfg)
                .map_err(engine_error)?;
            times.push(t.elapsed().as_secs_f64());
            if trial == 0 {
                cells = r.diagnostics.cell_count;
            } else if cells != r.diagnostics.cell_count {
                return Err(CliError::Numerical(format!(
                    "nondeterministic cell count at n = {n}"
                )));
            }
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = times[times.len() / 2];
        let _ = writeln!(csv, "{n},{actual},{cells},{median:.6}");
        println!("n = {n:4} (vertices {actual:4}): cells {cells:6}, median {median:.4}s");
    }
    if let Some(path) = &args.csv {
        write_file(path, &csv)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Approx(a) => cmd_approx(a),
        Command::Prob(a) => cmd_prob(a),
        Command::Convexity(a) => cmd_convexity(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
