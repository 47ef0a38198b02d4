use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use cpma::bench::{
    emit_results, load_dataset, load_item, run_noise_experiment, run_rotation_experiment,
    run_tau_sweep, summarize, BenchOptions, Dataset, MethodSpec, OutputFormat,
};
use cpma::cpma::{connect_cpma, extract_cpma, CpmaConfig, DEFAULT_TAU};
use cpma::grid::{save_grid, GridFormat};
use cpma::meshio::{parse_ply, voxelize, DEFAULT_RESOLUTION};
use cpma::metrics::{dubuisson_jain, hausdorff, jaccard, PointSet};
use cpma::perturb::RotationSpec;
use cpma::skeleton::{reconstruct, PrunerSpec};
use cpma::{BinaryGrid, MedialAxisTransform, ScoreField};

/// Medial axis extraction and pruning for binary images and voxel grids.
#[derive(Debug, Parser)]
#[command(name = "cpma", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract a (pruned) medial axis and write it as a grid.
    Skeletonize(SkeletonizeArgs),
    /// Reconstruct a shape from its medial axis and report the Jaccard index.
    Reconstruct(ReconstructArgs),
    /// Compare two skeleton grids.
    Metrics(MetricsArgs),
    /// Skeleton stability under boundary noise.
    NoiseBench(NoiseBenchArgs),
    /// Skeleton equivariance under rotations.
    RotationBench(RotationBenchArgs),
    /// Reconstruction quality as a function of the score threshold.
    TauSweep(TauSweepArgs),
    /// Voxelize an ASCII PLY triangle mesh.
    Voxelize(VoxelizeArgs),
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// mat, thinning, gima, bema, sat, sfema, cpma or ccpma
    #[arg(long, default_value = "cpma")]
    method: String,
    /// GIMA projection distance in pixels
    #[arg(long)]
    gamma: Option<f64>,
    /// BEMA angle in degrees
    #[arg(long)]
    theta: Option<f64>,
    /// SAT/SFEMA ball scale factor
    #[arg(long)]
    scale: Option<f64>,
    /// Score threshold for cpma/ccpma
    #[arg(long)]
    tau: Option<f64>,
    /// Number of low-pass reconstructions (default: half the largest extent)
    #[arg(long)]
    max_freq: Option<usize>,
    /// Enforce connectivity of the cpma output
    #[arg(long)]
    connect: bool,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input shape (.pbm, .vox or .ply)
    input: PathBuf,
    /// Voxel resolution for .ply inputs
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    mesh_resolution: usize,
}

#[derive(Debug, Args)]
struct SkeletonizeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    method: MethodArgs,
    /// Skeleton grid to write (.pbm in 2D, .vox in 3D)
    #[arg(long)]
    output: PathBuf,
    /// Optional CSV of nonzero score values (cpma methods only)
    #[arg(long)]
    score_output: Option<PathBuf>,
    /// Optional CSV of skeleton points and radii
    #[arg(long)]
    mat_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    method: MethodArgs,
    /// Reconstructed grid to write
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// First skeleton grid
    a: PathBuf,
    /// Second skeleton grid
    b: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Directory of .pbm/.vox/.ply shapes
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Result file
    #[arg(long)]
    out: PathBuf,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
    /// Default score threshold for cpma methods
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
    #[arg(long)]
    max_freq: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    mesh_resolution: usize,
}

#[derive(Debug, Args)]
struct NoiseBenchArgs {
    #[command(flatten)]
    bench: BenchArgs,
    /// Comma-separated methods, e.g. cpma,mat,gima:5
    #[arg(long, default_value = "cpma,mat")]
    methods: String,
    /// Noise levels: a list (1,5,10) or an inclusive range (1..20).
    /// Default: 1..20 in 2D, 1..10 in 3D
    #[arg(long)]
    levels: Option<String>,
}

#[derive(Debug, Args)]
struct RotationBenchArgs {
    #[command(flatten)]
    bench: BenchArgs,
    #[arg(long, default_value = "cpma,mat")]
    methods: String,
    /// Angles in degrees: a list (30,60), a stepped range (3..90:3), or
    /// azimuth/elevation pairs for 3D (18/36)
    #[arg(long, default_value = "3..90:3")]
    angles: String,
}

#[derive(Debug, Args)]
struct TauSweepArgs {
    #[command(flatten)]
    bench: BenchArgs,
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.47,0.5,0.6,0.7,0.8,0.9")]
    taus: String,
    /// Scale factors applied to each shape before the sweep
    #[arg(long, default_value = "1")]
    scales: String,
}

#[derive(Debug, Args)]
struct VoxelizeArgs {
    /// ASCII PLY mesh
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    /// Voxel grid to write (.vox)
    #[arg(long)]
    output: PathBuf,
}

/// A flag combination rejected before any computation; exits with status 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("cpma: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("cpma: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Skeletonize(a) => skeletonize(a),
        Command::Reconstruct(a) => reconstruct_cmd(a),
        Command::Metrics(a) => metrics(a),
        Command::NoiseBench(a) => noise_bench(a),
        Command::RotationBench(a) => rotation_bench(a),
        Command::TauSweep(a) => tau_sweep(a),
        Command::Voxelize(a) => voxelize_cmd(a),
    }
}

struct Resolved {
    method: MethodSpec,
    cfg: CpmaConfig,
}

fn resolve_method(m: &MethodArgs) -> Result<Resolved> {
    let name = m.method.to_ascii_lowercase();
    let method = match name.as_str() {
        "cpma" | "ccpma" => {
            if let Some(t) = m.tau.filter(|t| !(*t > 0.0 && *t < 1.0)) {
                return Err(usage(format!("--tau must be in (0, 1), got {t}")));
            }
            if name == "ccpma" || m.connect {
                MethodSpec::ConnectedCpma { tau: m.tau }
            } else {
                MethodSpec::Cpma { tau: m.tau }
            }
        }
        _ => {
            if m.connect {
                return Err(usage("--connect only applies to --method cpma"));
            }
            let param = m.gamma.or(m.theta).or(m.scale);
            let spec = PrunerSpec::from_parts(&name, param).map_err(|e| usage(e.to_string()))?;
            spec.validate().map_err(|e| usage(e.to_string()))?;
            MethodSpec::Pruner(spec)
        }
    };
    let cfg = CpmaConfig {
        tau: m.tau.unwrap_or(DEFAULT_TAU),
        max_freq: m.max_freq,
        ..CpmaConfig::default()
    };
    if m.max_freq == Some(0) {
        return Err(usage("--max-freq must be at least 1"));
    }
    Ok(Resolved { method, cfg })
}

fn load_input(input: &InputArgs) -> Result<BinaryGrid> {
    load_item(&input.input, input.mesh_resolution)
        .with_context(|| format!("cannot load {}", input.input.display()))
}

fn output_format(path: &Path, grid: &BinaryGrid) -> GridFormat {
    GridFormat::from_path(path).unwrap_or_else(|| GridFormat::for_ndim(grid.ndim()))
}

fn check_max_freq(cfg: &CpmaConfig, grid: &BinaryGrid) -> Result<()> {
    cfg.validate(grid.dims()).map_err(|e| usage(e.to_string()))
}

fn skeletonize(a: SkeletonizeArgs) -> Result<()> {
    let r = resolve_method(&a.method)?;
    let is_cpma = !matches!(r.method, MethodSpec::Pruner(_));
    if a.score_output.is_some() && !is_cpma {
        return Err(usage("--score-output requires --method cpma"));
    }
    let grid = load_input(&a.input)?;
    let (mat, field) = if is_cpma {
        check_max_freq(&r.cfg, &grid)?;
        let (raw, field) = extract_cpma(&grid, &r.cfg)?;
        let mat = if matches!(r.method, MethodSpec::ConnectedCpma { .. }) {
            let connected = connect_cpma(&raw, &field, &grid, &r.cfg)?;
            if connected.status.cap_reached {
                log::warn!("connection stopped at the iteration cap");
            }
            connected.mat
        } else {
            raw
        };
        (mat, Some(field))
    } else {
        (r.method.run(&grid, &r.cfg)?, None)
    };
    let skel = mat.to_grid();
    save_grid(&skel, &a.output, output_format(&a.output, &grid))
        .with_context(|| format!("cannot write {}", a.output.display()))?;
    if let (Some(path), Some(field)) = (&a.score_output, &field) {
        write_scores(path, field).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &a.mat_output {
        write_mat(path, &mat).with_context(|| format!("cannot write {}", path.display()))?;
    }
    info!("{} skeleton points", mat.len());
    println!("method\t{}\npoints\t{}", r.method, mat.len());
    Ok(())
}

fn write_scores(path: &Path, field: &ScoreField) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let dims = field.dims();
    writeln!(out, "x,y,z,score")?;
    for (i, &v) in field.values().iter().enumerate() {
        if v > 0.0 {
            let c = dims.coords(i);
            writeln!(out, "{},{},{},{v}", c[0], c[1], c[2])?;
        }
    }
    out.flush()?;
    Ok(())
}

fn write_mat(path: &Path, mat: &MedialAxisTransform) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "x,y,z,radius")?;
    for e in mat.elements() {
        let c = e.point.coords;
        writeln!(out, "{},{},{},{}", c[0], c[1], c[2], e.radius)?;
    }
    out.flush()?;
    Ok(())
}

fn reconstruct_cmd(a: ReconstructArgs) -> Result<()> {
    let r = resolve_method(&a.method)?;
    let grid = load_input(&a.input)?;
    if !matches!(r.method, MethodSpec::Pruner(_)) {
        check_max_freq(&r.cfg, &grid)?;
    }
    let mat = r.method.run(&grid, &r.cfg)?;
    let rec = reconstruct(&mat, grid.dims());
    save_grid(&rec, &a.output, output_format(&a.output, &grid))
        .with_context(|| format!("cannot write {}", a.output.display()))?;
    println!("points\t{}\njaccard\t{}", mat.len(), jaccard(&rec, &grid)?);
    Ok(())
}

fn load_grid_any(path: &Path) -> Result<BinaryGrid> {
    load_item(path, DEFAULT_RESOLUTION).with_context(|| format!("cannot load {}", path.display()))
}

fn metrics(a: MetricsArgs) -> Result<()> {
    let (ga, gb) = (load_grid_any(&a.a)?, load_grid_any(&a.b)?);
    let (pa, pb) = (PointSet::from_grid(&ga), PointSet::from_grid(&gb));
    println!("hausdorff\t{}", hausdorff(&pa, &pb)?);
    println!("dubuisson_jain\t{}", dubuisson_jain(&pa, &pb)?);
    if ga.dims() == gb.dims() {
        println!("jaccard\t{}", jaccard(&ga, &gb)?);
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("bad {what} {t:?}"))))
        .collect()
}

fn parse_methods(s: &str) -> Result<Vec<MethodSpec>> {
    let methods: Vec<MethodSpec> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|e: cpma::Error| usage(e.to_string())))
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        return Err(usage("--methods is empty"));
    }
    Ok(methods)
}

fn parse_levels(s: &str) -> Result<Vec<usize>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| usage(format!("bad level range {s:?}")))?;
        let hi: usize = hi.trim().parse().map_err(|_| usage(format!("bad level range {s:?}")))?;
        if lo > hi {
            return Err(usage(format!("empty level range {s:?}")));
        }
        return Ok((lo..=hi).collect());
    }
    parse_list(s, "level")
}

fn parse_angles(s: &str) -> Result<Vec<RotationSpec>> {
    let bad = || usage(format!("bad angle list {s:?}"));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((range, step)) = item.split_once(':') {
            let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
            let (lo, hi, step): (f64, f64, f64) = (
                lo.parse().map_err(|_| bad())?,
                hi.parse().map_err(|_| bad())?,
                step.parse().map_err(|_| bad())?,
            );
            if !(step > 0.0) {
                return Err(bad());
            }
            let n = ((hi - lo) / step + 1e-9).floor() as i64;
            for k in 0..=n {
                let v = lo + k as f64 * step;
                out.push(RotationSpec { angle2d: v, azimuth: v, elevation: v });
            }
        } else if let Some((az, el)) = item.split_once('/') {
            let (az, el): (f64, f64) = (az.parse().map_err(|_| bad())?, el.parse().map_err(|_| bad())?);
            out.push(RotationSpec { angle2d: az, azimuth: az, elevation: el });
        } else {
            let v: f64 = item.parse().map_err(|_| bad())?;
            out.push(RotationSpec { angle2d: v, azimuth: v, elevation: v });
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    for a in &out {
        a.validate().map_err(|e| usage(e.to_string()))?;
    }
    Ok(out)
}

fn prepare(b: &BenchArgs) -> Result<(Dataset, BenchOptions, OutputFormat)> {
    let format: OutputFormat = b.format.parse().map_err(|e: cpma::Error| usage(e.to_string()))?;
    if !(b.tau > 0.0 && b.tau < 1.0) {
        return Err(usage(format!("--tau must be in (0, 1), got {}", b.tau)));
    }
    if b.jobs == Some(0) || b.max_freq == Some(0) {
        return Err(usage("--jobs and --max-freq must be at least 1"));
    }
    if !b.dataset.is_dir() {
        return Err(usage(format!("dataset directory {} does not exist", b.dataset.display())));
    }
    let dataset = load_dataset(&b.dataset, b.mesh_resolution)?;
    let opts = BenchOptions {
        cpma: CpmaConfig { tau: b.tau, max_freq: b.max_freq, ..CpmaConfig::default() },
        jobs: b.jobs,
        partial_path: Some(b.out.with_extension("partial.csv")),
    };
    Ok((dataset, opts, format))
}

fn finish(records: Vec<cpma::bench::BenchmarkRecord>, b: &BenchArgs, opts: &BenchOptions, format: OutputFormat) -> Result<()> {
    emit_results(&records, &b.out, format).with_context(|| format!("cannot write {}", b.out.display()))?;
    if let Some(p) = &opts.partial_path {
        let _ = std::fs::remove_file(p);
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "method\tparams\tperturbation\tmetric\tn\tmean\tstd")?;
    for s in summarize(&records) {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
            s.method, s.params, s.perturbation, s.metric, s.count, s.mean, s.std
        )?;
    }
    Ok(())
}

fn noise_bench(a: NoiseBenchArgs) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    let explicit = a.levels.as_deref().map(parse_levels).transpose()?;
    let (dataset, opts, format) = prepare(&a.bench)?;
    let levels = explicit.unwrap_or_else(|| {
        let max = if dataset.items.iter().all(|(_, g)| g.ndim() == 3) { 10 } else { 20 };
        (1..=max).collect()
    });
    let records = run_noise_experiment(&dataset, &methods, &levels, a.bench.seed, &opts)?;
    finish(records, &a.bench, &opts, format)
}

fn rotation_bench(a: RotationBenchArgs) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    let angles = parse_angles(&a.angles)?;
    let (dataset, opts, format) = prepare(&a.bench)?;
    let records = run_rotation_experiment(&dataset, &methods, &angles, a.bench.seed, &opts)?;
    finish(records, &a.bench, &opts, format)
}

fn tau_sweep(a: TauSweepArgs) -> Result<()> {
    let taus: Vec<f64> = parse_list(&a.taus, "tau")?;
    let scales: Vec<f64> = parse_list(&a.scales, "scale")?;
    if let Some(t) = taus.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(usage(format!("tau must be in (0, 1), got {t}")));
    }
    if let Some(s) = scales.iter().find(|s| !(**s > 0.0)) {
        return Err(usage(format!("scale must be positive, got {s}")));
    }
    let (dataset, opts, format) = prepare(&a.bench)?;
    let records = run_tau_sweep(&dataset, &taus, &scales, a.bench.seed, &opts)?;
    finish(records, &a.bench, &opts, format)
}

fn voxelize_cmd(a: VoxelizeArgs) -> Result<()> {
    if a.resolution < 8 {
        return Err(usage(format!("--resolution must be at least 8, got {}", a.resolution)));
    }
    let mesh = parse_ply(&a.input).with_context(|| format!("cannot load {}", a.input.display()))?;
    let grid = voxelize(&mesh, a.resolution)?;
    save_grid(&grid, &a.output, GridFormat::Vox)
        .with_context(|| format!("cannot write {}", a.output.display()))?;
    println!("dims\t{}\nvoxels\t{}", grid.dims(), grid.count());
    Ok(())
}
