//! `transformesh` command-line tool.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use nalgebra::{Point3, Vector3};
use serde_json::{json, Value};

use transformesh::evolve::{evolve_with, laplacians, EvolutionParams, IterationStats, VelocityField};
use transformesh::intersect::build_catalog;
use transformesh::kernel::PerturbationPolicy;
use transformesh::mesh::io::{load_oriented_points, load_path, save_path, MeshFormat};
use transformesh::mesh::validate::{validate_with, ValidationOptions};
use transformesh::morph::{build_target, morph_with, MorphConfig, OrientedTarget};
use transformesh::transformesh::{transformesh_with_stats, TransformeshOptions};
use transformesh::winding::winding_number;
use transformesh::SurfaceMesh;

/// Version of the JSON documents written by `--stats json` and `stats`.
const STATS_FORMAT_VERSION: u32 = 1;

fn long_version() -> &'static str {
    let text = format!(
        "{}\nlibrary {}\nstats format {STATS_FORMAT_VERSION}\nmesh formats: OFF, OBJ (v/f), PLY (ASCII and binary in, ASCII out)",
        env!("CARGO_PKG_VERSION"),
        transformesh::VERSION
    );
    Box::leak(text.into_boxed_str())
}

#[derive(Parser)]
#[command(name = "transformesh", version, about = "Remove self-intersections from triangle meshes and evolve surfaces")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, env = "TRANSFORMESH_THREADS")]
    threads: Option<usize>,

    /// Seed for ray directions and other randomised choices.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,

    /// Log progress to stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Remove self-intersections and keep the exterior surface.
    Clean(CleanArgs),
    /// Move a surface along a built-in velocity field.
    Evolve(EvolveArgs),
    /// Morph a surface onto a target mesh or oriented point set.
    Morph(MorphArgs),
    /// Check manifoldness, orientation and self-intersections.
    Validate(ValidateArgs),
    /// Winding number of a point with respect to a closed mesh.
    Winding(WindingArgs),
    /// Mesh measurements and intersection counters as JSON.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Args)]
struct CleaningFlags {
    /// Keep closed components enclosed by other components.
    #[arg(long)]
    keep_interior: bool,
    /// Accept meshes with boundary.
    #[arg(long)]
    open: bool,
    /// Perturbation size relative to the local mean edge length.
    #[arg(long, default_value_t = 1e-8, allow_negative_numbers = true)]
    perturb_delta: f64,
    /// Perturbed attempts before giving up on a degenerate input.
    #[arg(long, default_value_t = 5)]
    max_retries: u32,
}

impl CleaningFlags {
    fn options(&self, seed: u64) -> transformesh::Result<TransformeshOptions> {
        let policy = PerturbationPolicy { delta: self.perturb_delta, max_retries: self.max_retries };
        policy.validate()?;
        Ok(TransformeshOptions { keep_interior: self.keep_interior, open_surface_mode: self.open, policy, seed })
    }
}

#[derive(Args)]
struct CleanArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    cleaning: CleaningFlags,
    /// Print run statistics to stdout.
    #[arg(long, value_enum)]
    stats: Option<Format>,
}

#[derive(Args)]
struct StepFlags {
    /// Time step.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Largest step as a fraction of the local mean edge length.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Laplacian smoothing weight.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Bi-Laplacian smoothing weight.
    #[arg(long, allow_negative_numbers = true)]
    beta2: Option<f64>,
    /// Shortest edge kept by remeshing (default 0.7 of the mean edge length).
    #[arg(long, allow_negative_numbers = true)]
    e1: Option<f64>,
    /// Longest edge kept by remeshing (default 1.5 of the mean edge length).
    #[arg(long, allow_negative_numbers = true)]
    e2: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Print one JSON line per iteration and a summary to stdout.
    #[arg(long, value_enum)]
    stats: Option<Format>,
}

impl StepFlags {
    /// Range checks that need no mesh.
    fn check(&self) -> Result<(), CliError> {
        let positive = [("t", self.t), ("alpha", self.alpha), ("e1", self.e1), ("e2", self.e2)];
        for (name, v) in positive {
            if matches!(v, Some(x) if !(x > 0.0 && x.is_finite())) {
                return Err(CliError::usage(format!("--{name} must be positive")));
            }
        }
        for (name, v) in [("beta", self.beta), ("beta2", self.beta2)] {
            if matches!(v, Some(x) if !(x >= 0.0 && x.is_finite())) {
                return Err(CliError::usage(format!("--{name} must be non-negative")));
            }
        }
        if let (Some(a), Some(b)) = (self.e1, self.e2) {
            if a >= b {
                return Err(CliError::usage("--e1 must be smaller than --e2"));
            }
        }
        if self.max_iters == Some(0) {
            return Err(CliError::usage("--max-iters must be at least 1"));
        }
        Ok(())
    }

    fn apply(&self, p: &mut EvolutionParams) -> transformesh::Result<()> {
        p.t = self.t.unwrap_or(p.t);
        p.alpha = self.alpha.unwrap_or(p.alpha);
        p.beta = self.beta.unwrap_or(p.beta);
        p.beta2 = self.beta2.unwrap_or(p.beta2);
        p.e1 = self.e1.unwrap_or(p.e1);
        p.e2 = self.e2.unwrap_or(p.e2);
        p.max_iterations = self.max_iters.unwrap_or(p.max_iterations);
        p.validate()
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Field {
    /// Constant speed along the vertex normals.
    Normal,
    /// Mean-curvature flow (the Laplace-Beltrami vector).
    Curvature,
}

#[derive(Args)]
struct EvolveArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "normal")]
    field: Field,
    /// Field multiplier; negative values move inward.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    speed: f64,
    #[command(flatten)]
    step: StepFlags,
    #[command(flatten)]
    cleaning: CleaningFlags,
}

#[derive(Args)]
struct MorphArgs {
    #[arg(long)]
    source: PathBuf,
    /// Target mesh, or a text file with `x y z nx ny nz` per line.
    #[arg(long)]
    target: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Converged once every vertex stays this close to the target (default 0.5 e1).
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
    /// Write every N-th intermediate surface next to the output.
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[command(flatten)]
    step: StepFlags,
}

#[derive(Args)]
struct ValidateArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    report: Option<Format>,
    /// Skip the self-intersection sweep.
    #[arg(long)]
    no_self_intersections: bool,
    /// Accept boundary edges.
    #[arg(long)]
    allow_boundary: bool,
}

#[derive(Args)]
struct WindingArgs {
    input: PathBuf,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true, required = true)]
    point: Vec<f64>,
}

#[derive(Args)]
struct StatsArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 1e-8, allow_negative_numbers = true)]
    perturb_delta: f64,
    #[arg(long, default_value_t = 5)]
    max_retries: u32,
}

#[derive(Debug)]
struct CliError {
    category: &'static str,
    message: String,
    code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { category: "usage", message: message.into(), code: 2 }
    }
}

impl From<transformesh::Error> for CliError {
    fn from(e: transformesh::Error) -> Self {
        use transformesh::Error as E;
        let code = match &e {
            E::InvalidParameter(_) => 2,
            E::Io(_) => 3,
            E::Parse { .. } => 4,
            _ => 5,
        };
        CliError { category: e.category(), message: e.to_string(), code }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        transformesh::Error::Io(e).into()
    }
}

fn load(path: &Path) -> Result<SurfaceMesh, CliError> {
    let (mesh, report) = load_path(path).map_err(|e| with_path(e, path))?;
    if report.fan_triangulated > 0 {
        log::info!("{}: fan-triangulated {} polygons", path.display(), report.fan_triangulated);
    }
    Ok(mesh)
}

fn save(mesh: &SurfaceMesh, path: &Path) -> Result<(), CliError> {
    save_path(mesh, path).map_err(|e| with_path(e, path))
}

fn with_path(e: transformesh::Error, path: &Path) -> CliError {
    let mut err = CliError::from(e);
    err.message = format!("{}: {}", path.display(), err.message);
    err
}

fn check_mesh_path(path: &Path) -> Result<(), CliError> {
    match MeshFormat::from_path(path) {
        Some(_) => Ok(()),
        None => Err(CliError::usage(format!("{}: unknown mesh extension (use .off, .obj or .ply)", path.display()))),
    }
}

fn mesh_summary(m: &SurfaceMesh) -> Value {
    json!({
        "vertices": m.num_vertices(),
        "faces": m.num_faces(),
        "edges": m.num_edges(),
        "components": m.num_components(),
        "closed": m.is_closed(),
        "euler_characteristic": m.euler_characteristic(),
        "volume": m.signed_volume().ok(),
        "area": m.surface_area(),
    })
}

fn emit(out: &mut impl Write, command: &str, key: &str, body: Value) -> Result<(), CliError> {
    let doc = json!({ "format_version": STATS_FORMAT_VERSION, "command": command, key: body });
    writeln!(out, "{doc}")?;
    Ok(())
}

fn iteration_json(s: &IterationStats) -> Value {
    serde_json::to_value(s).expect("iteration stats serialize")
}

fn clean(args: &CleanArgs, seed: u64) -> Result<(), CliError> {
    let opts = args.cleaning.options(seed)?;
    check_mesh_path(&args.output)?;
    let input = load(&args.input)?;
    let (out, stats) = transformesh_with_stats(&input, &opts)?;
    save(&out, &args.output)?;
    if args.stats.is_some() {
        let body = json!({ "input": mesh_summary(&input), "output": mesh_summary(&out), "transformesh": stats });
        emit(&mut std::io::stdout().lock(), "clean", "summary", body)?;
    }
    Ok(())
}

fn velocity(field: Field, speed: f64, m: &SurfaceMesh) -> VelocityField {
    match field {
        Field::Normal => m.vertex_normals().into_iter().map(|n| n * speed).collect(),
        Field::Curvature => laplacians(m).into_iter().map(|l| l * speed).collect(),
    }
}

fn evolve(args: &EvolveArgs, seed: u64) -> Result<(), CliError> {
    args.step.check()?;
    if !args.speed.is_finite() {
        return Err(CliError::usage("--speed must be finite"));
    }
    let cleaning = args.cleaning.options(seed)?;
    check_mesh_path(&args.output)?;
    let input = load(&args.input)?;
    let mut params = EvolutionParams::for_mesh(&input);
    params.cleaning = cleaning;
    args.step.apply(&mut params)?;
    let stats = args.step.stats.is_some();
    let mut stdout = std::io::stdout().lock();
    let mut provider = |m: &SurfaceMesh| Ok(velocity(args.field, args.speed, m));
    let (out, history) = evolve_with(&input, &mut provider, &params, |_, s| {
        if stats {
            emit(&mut stdout, "evolve", "iteration", iteration_json(s))
                .map_err(|e| transformesh::Error::Internal(e.message))?;
        }
        Ok(())
    })?;
    save(&out, &args.output)?;
    if stats {
        let body = json!({ "iterations": history.len(), "output": mesh_summary(&out) });
        emit(&mut stdout, "evolve", "summary", body)?;
    }
    Ok(())
}

fn load_target(path: &Path) -> Result<OrientedTarget, CliError> {
    if MeshFormat::from_path(path).is_some() {
        return Ok(OrientedTarget::from_mesh(&load(path)?)?);
    }
    let file = std::fs::File::open(path).map_err(|e| with_path(e.into(), path))?;
    let samples = load_oriented_points(file).map_err(|e| with_path(e, path))?;
    let (points, normals): (Vec<Point3<f64>>, Vec<Vector3<f64>>) = samples.into_iter().unzip();
    Ok(build_target(&points, &normals)?)
}

fn snapshot_path(output: &Path, iteration: usize) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("morph");
    let ext = output.extension().and_then(|s| s.to_str()).unwrap_or("off");
    output.with_file_name(format!("{stem}.{iteration:04}.{ext}"))
}

fn morph(args: &MorphArgs, seed: u64) -> Result<(), CliError> {
    args.step.check()?;
    if matches!(args.threshold, Some(x) if !(x > 0.0 && x.is_finite())) {
        return Err(CliError::usage("--threshold must be positive"));
    }
    if args.snapshot_every == Some(0) {
        return Err(CliError::usage("--snapshot-every must be at least 1"));
    }
    check_mesh_path(&args.output)?;
    let source = load(&args.source)?;
    let target = load_target(&args.target)?;
    let mut config = MorphConfig::for_source(&source);
    config.params.cleaning.seed = seed;
    config.params.max_iterations = 1000;
    args.step.apply(&mut config.params)?;
    config.threshold = args.threshold.unwrap_or(0.5 * config.params.e1);
    let stats = args.step.stats.is_some();
    let mut stdout = std::io::stdout().lock();
    let (out, report) = morph_with(&source, &target, &config, |m, s| {
        if let Some(n) = args.snapshot_every {
            if s.iteration % n == 0 {
                save_path(m, &snapshot_path(&args.output, s.iteration))?;
            }
        }
        if stats {
            emit(&mut stdout, "morph", "iteration", iteration_json(s))
                .map_err(|e| transformesh::Error::Internal(e.message))?;
        }
        Ok(())
    })?;
    save(&out, &args.output)?;
    if stats {
        let body = json!({
            "iterations": report.iterations.len(),
            "converged": report.converged,
            "distances": report.distances,
            "output": mesh_summary(&out),
        });
        emit(&mut stdout, "morph", "summary", body)?;
    }
    if !report.converged {
        log::warn!("morph stopped after {} iterations without converging", report.iterations.len());
    }
    Ok(())
}

fn validate(args: &ValidateArgs) -> Result<(), CliError> {
    let mesh = load(&args.input)?;
    let opts = ValidationOptions {
        check_self_intersections: !args.no_self_intersections,
        allow_boundary: args.allow_boundary,
    };
    let report = validate_with(&mesh, &opts);
    let mut stdout = std::io::stdout().lock();
    match args.report {
        Some(Format::Json) => writeln!(stdout, "{}", report.to_json())?,
        None => {
            writeln!(stdout, "manifold: {}", report.is_manifold)?;
            writeln!(stdout, "violations: {}", report.violations.len())?;
            for (kind, n) in &report.counts {
                writeln!(stdout, "{kind}: {n}")?;
            }
        }
    }
    if report.is_manifold && report.violations.is_empty() {
        Ok(())
    } else {
        Err(CliError { category: "invalid-mesh", message: format!("{} violations", report.violations.len()), code: 1 })
    }
}

fn winding(args: &WindingArgs, seed: u64) -> Result<(), CliError> {
    let mesh = load(&args.input)?;
    if !mesh.is_closed() {
        return Err(transformesh::Error::OpenMesh("the winding number").into());
    }
    let p = Point3::new(args.point[0], args.point[1], args.point[2]);
    let w = winding_number(&p, &mesh, seed)?;
    writeln!(std::io::stdout().lock(), "{w}")?;
    Ok(())
}

fn stats(args: &StatsArgs) -> Result<(), CliError> {
    let policy = PerturbationPolicy { delta: args.perturb_delta, max_retries: args.max_retries };
    policy.validate()?;
    let mesh = load(&args.input)?;
    let (_, catalog) = build_catalog(&mesh, &policy)?;
    let body = json!({
        "mesh": mesh_summary(&mesh),
        "mean_edge_length": mesh.mean_edge_length(),
        "catalog": catalog.counters,
        "intersected_faces": (0..mesh.num_faces() as u32).filter(|&f| catalog.is_intersected(f)).count(),
    });
    emit(&mut std::io::stdout().lock(), "stats", "summary", body)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError {
            category: "internal",
            message: e.to_string(),
            code: 5,
        })?;
    }
    match &cli.command {
        Command::Clean(a) => clean(a, cli.seed),
        Command::Evolve(a) => evolve(a, cli.seed),
        Command::Morph(a) => morph(a, cli.seed),
        Command::Validate(a) => validate(a),
        Command::Winding(a) => winding(a, cli.seed),
        Command::Stats(a) => stats(a),
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().long_version(long_version()).try_get_matches();
    let cli = match matches.and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: usage: {first} (see --help)");
            return ExitCode::from(2);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.category, e.message.replace('\n', " "));
            ExitCode::from(e.code)
        }
    }
}
