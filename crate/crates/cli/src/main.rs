//! `planefix`: index computations, disc approximations and fixed-point
//! certificates from the command line.
//!
//! Exit status: 0 on success, 2 when a certification fails, 1 on bad input.

mod report;
mod spec;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use planefix::fixedpoint::{
    check_invariance, Classification, InvariancePolicy, Outcome, ResultSource, SubdivisionLevel,
};
use planefix::geometry::{segments_intersect, Intersection};
use planefix::grid::{access_segments, write_grid, GridConfig};
use planefix::maps::spot_check;
use planefix::{
    build_disc, certify_theorem_a, certify_theorem_d, index_along, locate_by_subdivision, two_fixed_points_scenario,
    FixedPointError, FixedPointResult, GridContinuum, IndexError, PipelineConfig, Point2,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use thiserror::Error;

use report::{point, Report};
use spec::{parse_continuum, parse_curve, parse_dyadic, parse_map, parse_points, Map};
use svg::Figure;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
    /// The computation finished but its conclusion does not hold.
    #[error("{reason}")]
    Unmet { report: Box<Report>, reason: String },
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) | CliError::Unmet { .. } => 2,
            CliError::Input(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<FixedPointError> for CliError {
    fn from(e: FixedPointError) -> Self {
        match e {
            FixedPointError::Grid(_) | FixedPointError::EmptyInvariantSet | FixedPointError::Index(IndexError::Geometry(_)) => {
                CliError::Input(e.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        FixedPointError::Index(e).into()
    }
}

#[derive(Parser)]
#[command(name = "planefix", version, about = "Fixed-point certificates for plane homeomorphisms")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for random continua and map spot checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write a diagnostic SVG figure.
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Pipeline {
    /// Stop subdividing once the located square's diameter is at most this
    /// (`2^-20`, `1/1024`, `0.125`).
    #[arg(long, value_name = "DYADIC")]
    radius: Option<String>,
    /// Which half of `h(K) = K` to verify.
    #[arg(long, value_enum, default_value_t = Policy::Full)]
    policy: Policy,
    /// Invariance slack in cells.
    #[arg(long, default_value_t = 1.5)]
    kappa: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Full,
    Forward,
    Skip,
}

#[derive(Subcommand)]
enum Command {
    /// Index of a map along a closed curve.
    Index {
        #[arg(long)]
        map: String,
        #[arg(long)]
        curve: String,
    },
    /// Nested disc approximations of a grid continuum.
    Approximate {
        #[arg(long)]
        continuum: String,
        /// Finest exponent (default: the continuum's exponent + 4).
        #[arg(long)]
        depth: Option<u32>,
        /// Access segments from this many sites on the finest boundary.
        #[arg(long, default_value_t = 0)]
        sites: usize,
        /// Save the continuum as a grid file.
        #[arg(long, value_name = "PATH")]
        write_grid: Option<PathBuf>,
    },
    /// Certify a fixed point in an invariant continuum.
    Certify {
        #[arg(long)]
        map: String,
        #[arg(long)]
        continuum: String,
        /// Largest exponent tried for the surrounding disc.
        #[arg(long)]
        depth: Option<u32>,
        /// Report the boundary index without locating a point.
        #[arg(long)]
        witness_only: bool,
        #[command(flatten)]
        pipeline: Pipeline,
    },
    /// Locate a fixed point inside a curve of nonzero index.
    Locate {
        #[arg(long)]
        map: String,
        #[arg(long)]
        curve: String,
        #[arg(long, value_name = "DYADIC")]
        radius: Option<String>,
    },
    /// Fixed point from a finite invariant set, e.g. a periodic orbit.
    TheoremD {
        #[arg(long)]
        map: String,
        /// `x,y;x,y;...`
        #[arg(long, allow_hyphen_values = true)]
        points: String,
        #[arg(long, value_name = "DYADIC")]
        radius: Option<String>,
        /// Largest half-side of the square search.
        #[arg(long, default_value_t = 64.0)]
        search_radius: f64,
    },
    /// Look for a second fixed point after excising the first.
    TheoremC {
        #[arg(long)]
        map: String,
        #[arg(long)]
        continuum: String,
        /// Declare that the map keeps both sides of the continuum's ends in
        /// place; two fixed points are then required.
        #[arg(long)]
        side_preserving: bool,
        #[arg(long)]
        depth: Option<u32>,
        #[command(flatten)]
        pipeline: Pipeline,
    },
}

fn pipeline_config(p: &Pipeline, g: Option<&GridContinuum>, depth: Option<u32>) -> Result<PipelineConfig, CliError> {
    let mut cfg = PipelineConfig::default();
    if let Some(r) = &p.radius {
        cfg.radius = parse_dyadic(r)?;
    }
    if !(p.kappa > 0.0 && p.kappa.is_finite()) {
        return Err(CliError::Input("--kappa must be positive".into()));
    }
    cfg.kappa = p.kappa;
    cfg.invariance = match p.policy {
        Policy::Full => InvariancePolicy::Full,
        Policy::Forward => InvariancePolicy::Forward,
        Policy::Skip => InvariancePolicy::Skip,
    };
    if let (Some(d), Some(g)) = (depth, g) {
        if d < g.exponent() || d > cfg.grid.depth_limit {
            return Err(CliError::Input(format!(
                "--depth must lie in {}..={}",
                g.exponent(),
                cfg.grid.depth_limit
            )));
        }
        cfg.max_extra_depth = d - g.exponent();
    }
    Ok(cfg)
}

fn radius_config(radius: &Option<String>) -> Result<PipelineConfig, CliError> {
    let mut cfg = PipelineConfig::default();
    if let Some(r) = radius {
        cfg.radius = parse_dyadic(r)?;
    }
    Ok(cfg)
}

fn continuum_summary(spec: &str, g: &GridContinuum) -> Report {
    let mut r = Report::new();
    r.set("spec", spec).set("exponent", g.exponent()).set("cells", g.len());
    r
}

fn source(s: &ResultSource) -> Value {
    match s {
        ResultSource::Subdivision => "subdivision".into(),
        ResultSource::Witnessed { displacement } => {
            let mut r = Report::new();
            r.num("witnessed_displacement", *displacement);
            r.into()
        }
    }
}

fn level(l: &SubdivisionLevel) -> Value {
    let mut r = Report::new();
    r.set("depth", l.depth)
        .point("lo", l.region.lo)
        .point("hi", l.region.hi)
        .set("parent_index", l.parent_index)
        .set("child_indices", l.child_indices.to_vec())
        .set("sum_matches", l.sum_matches)
        .set("jittered", l.jittered);
    r.into()
}

fn fixed_point(f: &FixedPointResult, with_levels: bool) -> Report {
    let mut r = Report::new();
    r.point("point", f.point).num("radius", f.radius).set("source", source(&f.source));
    let chain: Vec<Value> = f.certificate_chain.iter().map(|c| c.integer().map_or(Value::Null, Value::from)).collect();
    r.set("chain_indices", chain).set("levels", f.levels.len()).set("sum_mismatches", f.sum_mismatches());
    if with_levels {
        r.set("subdivision", f.levels.iter().map(level).collect::<Vec<_>>());
    }
    r
}

fn draw_result(fig: &mut Figure, f: &FixedPointResult) {
    if let Some(first) = f.levels.first() {
        fig.curve(&first.region.curve(), "#4a7bd0");
    }
    fig.marker(f.point, "#d02020");
}

fn run_index(map: &Map, curve_spec: &str, fig: &mut Figure) -> Result<Report, CliError> {
    let curve = parse_curve(curve_spec)?;
    let cert = index_along(map, &curve, &PipelineConfig::default().index)?;
    let Some(k) = cert.integer() else {
        return Err(CliError::Failed(format!("index did not snap to an integer ({} turns)", cert.index.turns)));
    };
    fig.curve(&curve, "#202020");
    if let Ok(image) = curve.map_vertices(|p| map.apply(p)) {
        fig.curve(&image, "#4a7bd0");
    }
    let mut r = Report::new();
    r.set("command", "index")
        .set("map", map.id())
        .set("curve", curve_spec)
        .set("index", k)
        .num("turns", cert.index.turns)
        .set("samples", cert.samples_used)
        .num("min_displacement", cert.min_displacement);
    Ok(r)
}

fn run_approximate(
    spec: &str,
    g: &GridContinuum,
    depth: Option<u32>,
    sites: usize,
    write: &Option<PathBuf>,
    fig: &mut Figure,
) -> Result<Report, CliError> {
    let cfg = GridConfig::default();
    let n = g.exponent();
    let depth = depth.unwrap_or(n + 4);
    if depth < n || depth > cfg.depth_limit {
        return Err(CliError::Input(format!("--depth must lie in {n}..={}", cfg.depth_limit)));
    }
    if let Some(path) = write {
        std::fs::write(path, write_grid(g)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    fig.continuum(g);
    let palette = ["#d02020", "#d08020", "#20a040", "#2060d0", "#8040c0"];
    let mut levels = Vec::new();
    let (mut nested_ok, mut bound_ok) = (true, true);
    let mut previous = None;
    for m in n..=depth {
        let d = build_disc(g, m, &cfg).map_err(|e| CliError::Input(e.to_string()))?;
        let distance = d.boundary_distance_to_source();
        let bound = std::f64::consts::SQRT_2 * d.cell_size();
        let within = distance <= bound * (1.0 + 1e-12);
        let nested = previous.as_ref().map(|p: &planefix::DiscApproximation| p.contains_region(&d));
        bound_ok &= within;
        nested_ok &= nested.unwrap_or(true);
        let mut r = Report::new();
        r.set("exponent", m)
            .set("cells", d.cell_count())
            .set("boundary_vertices", d.boundary().len())
            .num("max_boundary_distance", distance)
            .num("bound", bound)
            .set("within_bound", within)
            .set("nested_in_previous", nested.map_or(Value::Null, Value::from));
        levels.push(r.into_value());
        fig.curve(d.boundary(), palette[(m - n) as usize % palette.len()]);
        previous = Some(d);
    }
    let mut r = Report::new();
    r.set("command", "approximate").set("continuum", continuum_summary(spec, g)).set("levels", levels);
    if sites > 0 {
        let finest = previous.expect("at least one level");
        let segs = access_segments(&finest, &finest.sample_sites(sites), cfg.on_tol).map_err(|e| CliError::Failed(e.to_string()))?;
        let (mut pairs, mut violations) = (0usize, 0usize);
        for (i, a) in segs.iter().enumerate() {
            fig.segment(a.site, a.target, "#2060d0");
            for b in &segs[i + 1..] {
                pairs += 1;
                match segments_intersect(&a.segment(), &b.segment(), 1e-12) {
                    Intersection::Disjoint => {}
                    Intersection::Point(p) if g.distance_to(p) <= 1e-9 => {}
                    _ => violations += 1,
                }
            }
        }
        let mut a = Report::new();
        a.set("exponent", finest.exponent()).set("segments", segs.len()).set("pairs", pairs).set("violations", violations);
        r.set("access_segments", a);
        bound_ok &= violations == 0;
    }
    r.set("nesting_verified", nested_ok).set("bounds_verified", bound_ok);
    if !(nested_ok && bound_ok) {
        return Err(CliError::Unmet { report: Box::new(r), reason: "nesting or distance bound violated".into() });
    }
    Ok(r)
}

fn class_name(c: Option<Classification>) -> &'static str {
    match c {
        Some(Classification::Disjoint) => "disjoint",
        Some(Classification::Contracting) => "contracting",
        Some(Classification::Expanding) => "expanding",
        Some(Classification::Violated) => "violated",
        None => "unclassified",
    }
}

fn run_certify(
    map: &Map,
    spec: &str,
    g: &GridContinuum,
    cfg: &PipelineConfig,
    seed: u64,
    fig: &mut Figure,
) -> Result<Report, CliError> {
    let (lo, hi) = g.bounds();
    let (a, b) = (g.cell_square(lo).0, g.cell_square(hi).1);
    let check = spot_check(map, &mut ChaCha8Rng::seed_from_u64(seed), a.midpoint(b), a.dist(b).max(1.0), 256);
    let report = certify_theorem_a(map, g, cfg)?;

    fig.continuum(g);
    fig.curve(&report.boundary, "#202020");
    let mut counts = Report::new();
    counts.set("total", report.cuts.len());
    for name in ["disjoint", "contracting", "expanding", "violated", "unclassified"] {
        let k = report.cuts.iter().filter(|c| class_name(c.classification) == name).count();
        counts.set(name, k);
    }
    for cut in &report.cuts {
        let color = match cut.classification {
            Some(Classification::Expanding) => "#d08020",
            Some(Classification::Contracting) => "#20a040",
            Some(Classification::Disjoint) => "#2060d0",
            _ => "#d02020",
        };
        fig.curve(&cut.cut, color);
    }

    let mut mc = Report::new();
    mc.num("max_inverse_error", check.max_inverse_error).num("min_jacobian_det", check.min_jacobian_det).set("samples", check.samples);
    let inv = &report.invariance;
    let mut ir = Report::new();
    ir.num("forward_max", inv.forward_max).num("backward_max", inv.backward_max).num("tolerance", inv.tolerance).set("samples", inv.samples);
    let mut curve = Report::new();
    curve
        .set("exponent", report.exponent)
        .set("vertices", report.boundary.len())
        .num("epsilon", report.epsilon)
        .set("epsilon_condition_met", report.epsilon_condition_met);

    let mut r = Report::new();
    r.set("command", "certify")
        .set("map", map.id())
        .set("continuum", continuum_summary(spec, g))
        .set("map_check", mc)
        .set("invariance", ir)
        .set("curve", curve)
        .set("index", report.index.integer().map_or(Value::Null, Value::from))
        .set("cuts", counts)
        .set("expanding_count", report.expanding_count)
        .set("index_is_one_plus_expanding", report.cut_count_consistent().map_or(Value::Null, Value::from));
    match &report.outcome {
        Outcome::FixedPointFound(f) => {
            draw_result(fig, f);
            r.set("fixed_point", fixed_point(f, false));
        }
        Outcome::IndexWitness { certificate, expanding_count } => {
            let mut w = Report::new();
            w.set("index", certificate.integer().map_or(Value::Null, Value::from)).set("expanding_count", *expanding_count);
            r.set("witness", w);
        }
    }
    Ok(r)
}

fn run_locate(map: &Map, curve_spec: &str, cfg: &PipelineConfig, fig: &mut Figure) -> Result<Report, CliError> {
    let curve = parse_curve(curve_spec)?;
    let f = locate_by_subdivision(map, &curve, cfg)?;
    fig.curve(&curve, "#202020");
    draw_result(fig, &f);
    let mut r = Report::new();
    r.set("command", "locate").set("map", map.id()).set("curve", curve_spec).set("fixed_point", fixed_point(&f, true));
    Ok(r)
}

fn run_theorem_d(map: &Map, points: &[Point2], cfg: &PipelineConfig, fig: &mut Figure) -> Result<Report, CliError> {
    let f = certify_theorem_d(map, points, cfg)?;
    for &p in points {
        fig.marker(p, "#2060d0");
    }
    draw_result(fig, &f);
    let mut r = Report::new();
    r.set("command", "theorem-d")
        .set("map", map.id())
        .set("invariant_set", points.iter().map(|&p| point(p)).collect::<Vec<_>>())
        .set("fixed_point", fixed_point(&f, false));
    Ok(r)
}

fn run_theorem_c(
    map: &Map,
    spec: &str,
    g: &GridContinuum,
    cfg: &PipelineConfig,
    side_preserving: bool,
    fig: &mut Figure,
) -> Result<Report, CliError> {
    let invariance = check_invariance(map, g, cfg.kappa);
    let found = two_fixed_points_scenario(map, g, cfg)?;
    fig.continuum(g);
    for f in &found {
        fig.marker(f.point, "#d02020");
    }
    let mut r = Report::new();
    r.set("command", "theorem-c")
        .set("map", map.id())
        .set("continuum", continuum_summary(spec, g))
        .num("invariance_forward_max", invariance.forward_max)
        .set("side_preserving_declared", side_preserving)
        .set("fixed_points_found", found.len())
        .set("fixed_points", found.iter().map(|f| fixed_point(f, false).into_value()).collect::<Vec<_>>());
    if side_preserving && found.len() < 2 {
        let reason = format!("side-preserving map, but only {} fixed point found", found.len());
        return Err(CliError::Unmet { report: Box::new(r), reason });
    }
    Ok(r)
}

fn run(cli: &Cli) -> Result<(Report, Figure), CliError> {
    let mut fig = Figure::default();
    let report = match &cli.command {
        Command::Index { map, curve } => run_index(&parse_map(map)?, curve, &mut fig)?,
        Command::Approximate { continuum, depth, sites, write_grid } => {
            let g = parse_continuum(continuum, cli.seed)?;
            run_approximate(continuum, &g, *depth, *sites, write_grid, &mut fig)?
        }
        Command::Certify { map, continuum, depth, witness_only, pipeline } => {
            let h = parse_map(map)?;
            let g = parse_continuum(continuum, cli.seed)?;
            let mut cfg = pipeline_config(pipeline, Some(&g), *depth)?;
            cfg.witness_only = *witness_only;
            run_certify(&h, continuum, &g, &cfg, cli.seed, &mut fig)?
        }
        Command::Locate { map, curve, radius } => run_locate(&parse_map(map)?, curve, &radius_config(radius)?, &mut fig)?,
        Command::TheoremD { map, points, radius, search_radius } => {
            let mut cfg = radius_config(radius)?;
            if !(*search_radius > 0.0 && search_radius.is_finite()) {
                return Err(CliError::Input("--search-radius must be positive".into()));
            }
            cfg.search_radius = *search_radius;
            run_theorem_d(&parse_map(map)?, &parse_points(points)?, &cfg, &mut fig)?
        }
        Command::TheoremC { map, continuum, side_preserving, depth, pipeline } => {
            let h = parse_map(map)?;
            let g = parse_continuum(continuum, cli.seed)?;
            let cfg = pipeline_config(pipeline, Some(&g), *depth)?;
            run_theorem_c(&h, continuum, &g, &cfg, *side_preserving, &mut fig)?
        }
    };
    Ok((report, fig))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, fig)) => {
            if let Some(path) = &cli.svg {
                if let Err(e) = fig.write(path) {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.code());
                }
            }
            print!("{}", report.render(cli.json));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = e.code();
            if let CliError::Unmet { report, .. } = &e {
                print!("{}", (**report).clone().render(cli.json));
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
