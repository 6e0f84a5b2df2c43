//! `dimers`: command-line front end for the dimer-core library.
//!
//! Every subcommand prints a short summary on stdout. `--json PATH` writes
//! the full report (`-` for stdout); figure and table commands take `--csv`
//! and `--svg`. Existing files are only replaced with `--force`.
//!
//! Exit status: 0 on success, 2 on invalid input, 3 when a numerical
//! method fails to converge.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dimer_core::amoeba::{amoeba_grid, phase_of, ronkin_gradient, suggest_window, Phase, RonkinGrid, Window};
use dimer_core::charpoly::{
    characteristic_polynomial, log_partition_function_torus, normalize_sign_convention, partition_function_torus,
    spectral_polynomial, MagneticKasteleyn,
};
use dimer_core::export::{
    contour_svg, correlation_csv, fmt6, loops_csv, phase_csv, phase_svg, ronkin_csv, tension_csv, variance_csv,
};
use dimer_core::gibbs::{edge_probability, torus_edge_probability, EdgeRef, InverseKernel};
use dimer_core::harnack::{area_check, eigenvalue_pattern_check, transfer_chain, transfer_identity, two_to_one_check, HexWeights};
use dimer_core::lattice::{parse_domain, FundamentalDomain, DEFAULT_ENUMERATION_CAP};
use dimer_core::newton::newton_polygon;
use dimer_core::poly::{exact_to_json, float_to_json};
use dimer_core::sampler::{
    loop_census, matching_in_class, sample_exact, sample_mcmc, variance_profile, LoopOptions, SampleRun, SamplerKind,
    VarianceOptions,
};
use dimer_core::tension::{SurfaceTensionGrid, TensionSolver};
use dimer_core::{DimerError, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dimers", version, about = "Periodic bipartite dimer models: spectral curves, amoebae, surface tension, Gibbs statistics and sampling")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Replace existing output files.
    #[arg(long, global = true)]
    force: bool,
    /// Write the JSON report here; `-` prints it on stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SpecArg {
    /// Graph spec (JSON fundamental domain).
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    bx: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    by: f64,
}

#[derive(Args)]
struct FigureArgs {
    /// CSV of the underlying data.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// SVG figure; the CSV goes next to it unless `--csv` is given.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct WindowArgs {
    /// Window as `xmin,xmax,ymin,ymax`; defaults to one sized from the
    /// coefficients.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Window>,
    /// Nodes (or cells) per axis.
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic polynomial P(z, w).
    Poly {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Newton polygon of P.
    Newton {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Ronkin function on a grid.
    Ronkin {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        out: FigureArgs,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, default_value_t = 20)]
        levels: usize,
    },
    /// Amoeba raster and complement components.
    Amoeba {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        out: FigureArgs,
    },
    /// Surface tension on a grid over the Newton polygon.
    Tension {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        out: FigureArgs,
        /// σ samples per axis.
        #[arg(long, default_value_t = 41)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        levels: usize,
    },
    /// Phase of the Gibbs measure at a magnetic field.
    Phase {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Partition function of the n x n torus.
    Zn {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        n: usize,
    },
    /// Single-edge probabilities, infinite volume or on a torus.
    Probs {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        field: FieldArgs,
        /// Use the n x n torus at zero field instead of the infinite lattice.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Covariance of two edges along a lattice direction.
    Cov {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0)]
        e1: usize,
        #[arg(long, default_value_t = 0)]
        e2: usize,
        /// Translation step of the second edge as `dx,dy`.
        #[arg(long, value_parser = parse_pair, default_value = "1,0", allow_hyphen_values = true)]
        direction: (i32, i32),
        #[arg(long, default_value_t = 5)]
        rmin: i32,
        #[arg(long, default_value_t = 40)]
        rmax: i32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Random perfect matchings of the n x n torus.
    Sample {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: usize,
        /// Draw from the enumerated Boltzmann measure instead of running a
        /// face-rotation chain.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1000)]
        sweeps: usize,
        /// Height-change class `hx,hy` of the chain; defaults to the one
        /// selected by the field.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        class: Option<(i32, i32)>,
    },
    /// Height variance along a direction from a face-rotation chain.
    Variance {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        chains: usize,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long)]
        thin: Option<usize>,
        #[arg(long, value_parser = parse_pair, default_value = "1,0", allow_hyphen_values = true)]
        direction: (i32, i32),
        /// Distances as `rmin,rmax`.
        #[arg(long, value_parser = parse_pair)]
        range: Option<(i32, i32)>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Double-dimer loops around the center face.
    Loops {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 2000)]
        runs: usize,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long)]
        thin: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Maximality checks: 2-to-1 amoeba map, area, and for `--hex n` the
    /// transfer-matrix identity and eigenvalue pattern of a random chain.
    Harnack {
        #[arg(long, required_unless_present = "hex")]
        spec: Option<PathBuf>,
        #[arg(long)]
        hex: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Raster size of the area estimate.
        #[arg(long, default_value_t = 400)]
        area_resolution: usize,
    },
}

fn parse_pair(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated integers, got '{s}'"))?;
    let p = |t: &str| t.trim().parse::<i32>().map_err(|e| format!("'{t}': {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_window(s: &str) -> Result<Window, String> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"))).collect::<Result<_, _>>()?;
    match v[..] {
        [xmin, xmax, ymin, ymax] if xmin < xmax && ymin < ymax && v.iter().all(|x| x.is_finite()) => {
            Ok(Window { xmin, xmax, ymin, ymax })
        }
        _ => Err(format!("expected xmin,xmax,ymin,ymax with xmin < xmax and ymin < ymax, got '{s}'")),
    }
}

enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<DimerError> for CliError {
    fn from(e: DimerError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn load(spec: &Path) -> CliResult<FundamentalDomain> {
    let text = fs::read_to_string(spec).map_err(|e| usage(format!("cannot read {}: {e}", spec.display())))?;
    Ok(parse_domain(&text)?)
}

struct Output {
    force: bool,
    json: Option<PathBuf>,
}

impl Output {
    fn check(&self, path: &Path) -> CliResult<()> {
        if path.exists() && !self.force {
            return Err(usage(format!("{} exists; pass --force to replace it", path.display())));
        }
        Ok(())
    }

    fn write(&self, path: &Path, content: &str) -> CliResult<()> {
        self.check(path)?;
        fs::write(path, content).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
    }

    fn report(&self, command: &str, mut body: Value) -> CliResult<()> {
        let Some(path) = &self.json else { return Ok(()) };
        let obj = body.as_object_mut().expect("reports are JSON objects");
        obj.insert("schema".into(), json!(1));
        obj.insert("command".into(), json!(command));
        let text = serde_json::to_string_pretty(&body).expect("report serializes") + "\n";
        if path.as_os_str() == "-" {
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| usage(e.to_string()))
        } else {
            self.write(path, &text)
        }
    }

    /// CSV and SVG of a figure; the CSV lands next to the SVG by default.
    fn figure(&self, args: &FigureArgs, csv: impl FnOnce() -> CliResult<String>, svg: impl FnOnce() -> CliResult<String>) -> CliResult<()> {
        let csv_path = args.csv.clone().or_else(|| args.svg.as_ref().map(|p| p.with_extension("csv")));
        for p in csv_path.iter().chain(&args.svg) {
            self.check(p)?;
        }
        if let Some(p) = &csv_path {
            self.write(p, &csv()?)?;
        }
        if let Some(p) = &args.svg {
            self.write(p, &svg()?)?;
        }
        Ok(())
    }
}

fn window_or_default(p: &dimer_core::FloatPoly, w: &WindowArgs) -> Window {
    w.window.unwrap_or_else(|| suggest_window(p))
}

fn show(w: &Window) -> String {
    format!("[{}, {}] x [{}, {}]", fmt6(w.xmin), fmt6(w.xmax), fmt6(w.ymin), fmt6(w.ymax))
}

/// Height-change class of `G_n` selected by the field: `n ∇F` rounded.
fn class_of_field(p: &dimer_core::FloatPoly, n: usize, bx: f64, by: f64) -> (i32, i32) {
    let s = ronkin_gradient(p, bx, by);
    ((s.0 * n as f64).round() as i32, (s.1 * n as f64).round() as i32)
}

fn run(cli: Cli) -> CliResult<()> {
    let out = Output { force: cli.global.force, json: cli.global.json.clone() };
    let seed = cli.global.seed;
    match cli.command {
        Command::Poly { spec } => {
            let d = load(&spec.spec)?;
            let sp = spectral_polynomial(&d)?;
            let (normalized, poly_json) = match &sp.exact {
                Some(e) => {
                    let n = normalize_sign_convention(e)?;
                    (n.to_string(), exact_to_json(&n))
                }
                None => {
                    let n = normalize_sign_convention(&sp.float)?;
                    (n.to_string(), float_to_json(&n))
                }
            };
            println!("P = {normalized}");
            out.report("poly", json!({ "exact": sp.is_exact(), "normalized": normalized, "polynomial": poly_json }))
        }
        Command::Newton { spec } => {
            let p = characteristic_polynomial(&load(&spec.spec)?)?;
            let np = newton_polygon(&p);
            println!("vertices {:?}", np.vertices);
            println!("interior lattice points {}, area {}", np.interior.len(), fmt6(np.area()));
            out.report("newton", json!({ "polygon": np, "area": np.area() }))
        }
        Command::Ronkin { spec, window, out: fig, tolerance, levels } => {
            let p = characteristic_polynomial(&load(&spec.spec)?)?;
            let w = window_or_default(&p, &window);
            let n = window.resolution.unwrap_or(101);
            let g = RonkinGrid::compute(&p, w, n, n, tolerance)?;
            println!("Ronkin grid {n} x {n} over {}, max quadrature error {}", show(&w), fmt6(g.error));
            out.figure(&fig, || Ok(ronkin_csv(&g)?), || Ok(contour_svg(&g.xs, &g.ys, &g.values, levels)?))?;
            out.report("ronkin", json!({ "window": w, "nx": n, "ny": n, "error": g.error }))
        }
        Command::Amoeba { spec, window, out: fig } => {
            let p = characteristic_polynomial(&load(&spec.spec)?)?;
            let w = window_or_default(&p, &window);
            let d = amoeba_grid(&p, w, window.resolution.unwrap_or(400))?;
            use dimer_core::amoeba::ComponentKind::*;
            println!(
                "{} bounded, {} semi-bounded, {} unbounded complement components",
                d.count(Bounded),
                d.count(SemiBounded),
                d.count(Unbounded)
            );
            out.figure(&fig, || Ok(phase_csv(&d)?), || Ok(phase_svg(&d)))?;
            out.report(
                "amoeba",
                json!({
                    "window": d.window, "nx": d.nx, "ny": d.ny,
                    "bounded": d.count(Bounded), "semi_bounded": d.count(SemiBounded), "unbounded": d.count(Unbounded),
                    "components": d.components,
                }),
            )
        }
        Command::Tension { spec, window, out: fig, samples, levels } => {
            let p = characteristic_polynomial(&load(&spec.spec)?)?;
            let w = window.window.unwrap_or(Window::square(6.0));
            let n = window.resolution.unwrap_or(61);
            let g = RonkinGrid::compute(&p, w, n, n, 1e-11)?;
            let solver = TensionSolver::new(&p, &g);
            let t = SurfaceTensionGrid::compute(&solver, samples, samples)?;
            println!("σ on {samples} x {samples} points; conical points at {:?}", t.cusps);
            out.figure(&fig, || Ok(tension_csv(&t)?), || Ok(contour_svg(&t.ss, &t.ts, &t.values, levels)?))?;
            out.report("tension", json!({ "ronkin_window": w, "samples": samples, "cusps": t.cusps }))
        }
        Command::Phase { spec, field } => {
            let p = characteristic_polynomial(&load(&spec.spec)?)?;
            let r = phase_of(&p, field.bx, field.by)?;
            match r.lattice_slope {
                Some((a, b)) if r.phase != Phase::Liquid => println!("{}, component slope ({a},{b})", r.phase),
                _ => println!("{}, slope ({},{})", r.phase, fmt6(r.slope.0), fmt6(r.slope.1)),
            }
            out.report("phase", json!({ "field": [field.bx, field.by], "report": r }))
        }
        Command::Zn { spec, n } => {
            if n == 0 {
                return Err(usage("n must be positive"));
            }
            let d = load(&spec.spec)?;
            let p = characteristic_polynomial(&d)?;
            let log_z = log_partition_function_torus(&p, n)?;
            let exact = if d.has_exact_weights() && n <= 4 {
                Some(partition_function_torus::<Rational>(&d, n)?.to_string())
            } else {
                None
            };
            match &exact {
                Some(z) => println!("Z(G_{n}) = {z}"),
                None => println!("log Z(G_{n}) = {}", fmt6(log_z)),
            }
            out.report("zn", json!({ "n": n, "log_z": log_z, "exact": exact }))
        }
        Command::Probs { spec, field, n } => {
            let d = load(&spec.spec)?;
            let rows: Vec<(f64, f64)> = match n {
                Some(n) => {
                    if field.bx != 0.0 || field.by != 0.0 {
                        return Err(usage("torus probabilities are computed at zero field"));
                    }
                    let kast = MagneticKasteleyn::new(&d)?;
                    let torus = d.torus(n)?;
                    (0..d.edges.len())
                        .map(|e| Ok((torus_edge_probability::<f64>(&kast, &torus, &[torus.edge_instance(e, (0, 0))])?, 0.0)))
                        .collect::<CliResult<_>>()?
                }
                None => {
                    let k = InverseKernel::new(&d, field.bx, field.by)?;
                    (0..d.edges.len())
                        .map(|e| edge_probability(&k, &[EdgeRef::new(e, (0, 0))]).map(|v| (v.value, v.error)))
                        .collect::<Result<_, _>>()?
                }
            };
            for (e, (v, err)) in rows.iter().enumerate() {
                println!("edge {e}: {} ± {}", fmt6(*v), fmt6(*err));
            }
            let edges: Vec<Value> = rows.iter().enumerate().map(|(e, (v, err))| json!({ "edge": e, "probability": v, "error": err })).collect();
            out.report("probs", json!({ "field": [field.bx, field.by], "torus": n, "edges": edges }))
        }
        Command::Cov { spec, field, e1, e2, direction, rmin, rmax, csv } => {
            let d = load(&spec.spec)?;
            if e1 >= d.edges.len() || e2 >= d.edges.len() || rmin > rmax {
                return Err(usage("edge index out of range or empty distance range"));
            }
            let k = InverseKernel::new(&d, field.bx, field.by)?;
            let a = EdgeRef::new(e1, (0, 0));
            let p1 = edge_probability(&k, &[a])?;
            let mut rows = Vec::new();
            for r in rmin..=rmax {
                let cell = (r * direction.0, r * direction.1);
                let b = EdgeRef::new(e2, cell);
                if a == b {
                    continue;
                }
                let p2 = edge_probability(&k, &[b])?;
                let joint = edge_probability(&k, &[a, b])?;
                rows.push((cell, joint.value - p1.value * p2.value, joint.error + p1.error + p2.error));
            }
            println!("{} covariances of edge {e1} with translates of edge {e2} along {direction:?}", rows.len());
            if let Some(path) = &csv {
                out.write(path, &correlation_csv(&rows)?)?;
            }
            let table: Vec<Value> = rows.iter().map(|(c, v, e)| json!({ "offset": c, "value": v, "error": e })).collect();
            out.report("cov", json!({ "field": [field.bx, field.by], "e1": e1, "e2": e2, "rows": table }))
        }
        Command::Sample { spec, field, n, exact, count, sweeps, class } => {
            let d = load(&spec.spec)?;
            let torus = d.torus(n)?;
            let run = if exact {
                if field.bx != 0.0 || field.by != 0.0 || class.is_some() {
                    return Err(usage("exact sampling draws from the full torus measure; drop --bx/--by/--class"));
                }
                let samples = sample_exact(&torus, seed, count)?;
                SampleRun { kind: SamplerKind::ExactEnumeration, n, seed, sweeps: 0, frozen: false, samples: samples.into_iter().map(|m| m.by_white).collect() }
            } else {
                let p = characteristic_polynomial(&d)?;
                let target = class.unwrap_or_else(|| class_of_field(&p, n, field.bx, field.by));
                let mut current = matching_in_class(&torus, target)?;
                let mut samples = Vec::with_capacity(count);
                let mut frozen = false;
                for i in 0..count {
                    let r = sample_mcmc(&torus, current, seed.wrapping_add(i as u64), sweeps)?;
                    frozen |= r.frozen;
                    samples.push(r.matching.by_white.clone());
                    current = r.matching;
                }
                SampleRun { kind: SamplerKind::RotationMcmc, n, seed, sweeps, frozen, samples }
            };
            println!("{} samples on G_{n} ({:?}), frozen {}", run.samples.len(), run.kind, run.frozen);
            out.report("sample", json!({ "run": run, "enumeration_cap": DEFAULT_ENUMERATION_CAP }))
        }
        Command::Variance { spec, field, n, samples, chains, burn_in, thin, direction, range, csv } => {
            let d = load(&spec.spec)?;
            let r_range = match range {
                Some((a, b)) if a >= 1 && a <= b => Some((a as usize, b as usize)),
                Some(_) => return Err(usage("--range needs 1 <= rmin <= rmax")),
                None => None,
            };
            let opts = VarianceOptions { n, samples, burn_in, thin, chains, seed, direction, r_range };
            let v = variance_profile(&d, field.bx, field.by, &opts)?;
            match v.fit {
                Some(f) => println!("{} phase, log-slope {} (R² {})", v.phase, fmt6(f.slope), fmt6(f.r_squared)),
                None => println!("{} phase, no fit", v.phase),
            }
            if let Some(path) = &csv {
                out.write(path, &variance_csv(&v)?)?;
            }
            out.report("variance", json!({ "options": opts, "profile": v }))
        }
        Command::Loops { spec, field, sizes, runs, burn_in, thin, csv } => {
            let d = load(&spec.spec)?;
            if sizes.iter().any(|&s| s < 2) {
                return Err(usage("torus sizes must be at least 2"));
            }
            let opts = LoopOptions { sizes, runs, burn_in, thin, seed };
            let c = loop_census(&d, field.bx, field.by, &opts)?;
            for r in &c.runs {
                println!("n = {}: mean {} ± {}", r.n, fmt6(r.mean), fmt6(r.std_error));
            }
            if let Some(path) = &csv {
                out.write(path, &loops_csv(&c)?)?;
            }
            out.report("loops", json!({ "options": opts, "census": c }))
        }
        Command::Harnack { spec, hex, samples, area_resolution } => {
            let mut report = serde_json::Map::new();
            if let Some(spec) = spec {
                let p = characteristic_polynomial(&load(&spec)?)?;
                let m = two_to_one_check(&p, samples, seed)?;
                let a = area_check(&p, area_resolution, seed);
                println!(
                    "2-to-1: {} of {} points pass ({} nodes); area {} vs {} (gap {})",
                    m.checks - m.violations.len(),
                    m.checks,
                    m.nodes,
                    fmt6(a.estimate.area),
                    fmt6(a.expected),
                    fmt6(a.relative_gap)
                );
                report.insert("checks".into(), json!(m.checks));
                report.insert("samples".into(), json!(m.samples));
                report.insert("violations".into(), json!(m.violations));
                report.insert("seeds".into(), json!(m.seeds));
                report.insert("nodes".into(), json!(m.nodes));
                report.insert("area".into(), json!(a));
            }
            if let Some(n) = hex {
                if n == 0 || n > 12 {
                    return Err(usage("--hex needs 1 <= n <= 12"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let w = HexWeights::random(n, 0.2, 5.0, &mut rng);
                let id = transfer_identity(&w, seed)?;
                let eig = eigenvalue_pattern_check(&transfer_chain(&w)?)?;
                println!(
                    "transfer identity at {} points: max relative error {}; eigenvalue pattern {}",
                    id.points,
                    fmt6(id.max_relative_error),
                    if eig.holds { "holds" } else { "fails" }
                );
                report.insert("transfer".into(), json!({ "weights": w, "identity": id, "eigenvalues": eig }));
            }
            if report.is_empty() {
                return Err(usage("nothing to check"));
            }
            report.insert("seed".into(), json!(seed));
            out.report("harnack", Value::Object(report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("error: invalid thread count {t}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
