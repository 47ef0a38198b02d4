use std::sync::Mutex;

use log::{info, warn};
use rayon::prelude::*;

use super::dataset::{item_seed, Dataset};
use super::output::{emit_results, OutputFormat};
use super::{sort_records, BenchOptions, BenchmarkRecord, MethodSpec, Metric};
use crate::cpma::{connect_cpma, score_function, threshold_score, CpmaConfig};
use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, MedialAxisTransform};
use crate::metrics::{dubuisson_jain, hausdorff, jaccard, PointSet};
use crate::perturb::{apply_noise, rotate_grid, rotate_points, scale_grid, NoiseSpec, RotationSpec};
use crate::skeleton::reconstruct;

/// Runs `per_item` over the dataset on a worker pool. Failed items are logged
/// and skipped; the result is sorted by key columns.
fn run_items<F>(dataset: &Dataset, opts: &BenchOptions, per_item: F) -> Result<Vec<BenchmarkRecord>>
where
    F: Fn(&str, &BinaryGrid) -> Result<Vec<BenchmarkRecord>> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
    let collected = Mutex::new(Vec::new());
    pool.install(|| {
        dataset.items.par_iter().for_each(|(stem, grid)| match per_item(stem, grid) {
            Ok(records) => {
                info!("finished {stem}");
                let mut all = collected.lock().expect("record list poisoned");
                all.extend(records);
                if let Some(path) = &opts.partial_path {
                    let mut snapshot = all.clone();
                    sort_records(&mut snapshot);
                    if let Err(e) = emit_results(&snapshot, path, OutputFormat::Csv) {
                        warn!("cannot write partial results: {e}");
                    }
                }
            }
            Err(e) => warn!("skipping {stem}: {e}"),
        })
    });
    let mut out = collected.into_inner().expect("record list poisoned");
    sort_records(&mut out);
    Ok(out)
}

struct RecordSink<'a> {
    dataset: &'a str,
    item: &'a str,
    seed: u64,
    records: Vec<BenchmarkRecord>,
}

impl RecordSink<'_> {
    fn push(&mut self, method: &str, params: &str, perturbation: &str, metric: Metric, value: f64) {
        self.records.push(BenchmarkRecord {
            dataset: self.dataset.to_string(),
            item: self.item.to_string(),
            method: method.to_string(),
            params: params.to_string(),
            perturbation: perturbation.to_string(),
            metric,
            value,
            seed: self.seed,
        });
    }

    /// Hausdorff and Dubuisson-Jain rows; skipped with a warning when either
    /// skeleton is empty.
    fn distances(
        &mut self,
        method: &MethodSpec,
        cfg: &CpmaConfig,
        perturbation: &str,
        a: &MedialAxisTransform,
        b: &MedialAxisTransform,
    ) -> Result<()> {
        let (pa, pb) = (PointSet::from_mat(a), PointSet::from_mat(b));
        if pa.is_empty() || pb.is_empty() {
            warn!("{}: empty {method} skeleton at {perturbation}; no distance recorded", self.item);
            return Ok(());
        }
        let params = method.params(cfg);
        self.push(method.name(), &params, perturbation, Metric::Hausdorff, hausdorff(&pa, &pb)?);
        self.push(method.name(), &params, perturbation, Metric::DubuissonJain, dubuisson_jain(&pa, &pb)?);
        Ok(())
    }
}

fn validate_methods(methods: &[MethodSpec]) -> Result<()> {
    if methods.is_empty() {
        return Err(Error::Parameter("no methods given".into()));
    }
    methods.iter().try_for_each(MethodSpec::validate)
}

/// Distances between each method's skeleton of a shape and of its noisy
/// versions at every level. Level `k` applies the noise model `k` times with
/// a per-item seed derived from `seed`.
pub fn run_noise_experiment(
    dataset: &Dataset,
    methods: &[MethodSpec],
    levels: &[usize],
    seed: u64,
    opts: &BenchOptions,
) -> Result<Vec<BenchmarkRecord>> {
    validate_methods(methods)?;
    let cfg = &opts.cpma;
    run_items(dataset, opts, |stem, grid| {
        let noise_seed = item_seed(seed, stem);
        let base = methods.iter().map(|m| m.run(grid, cfg)).collect::<Result<Vec<_>>>()?;
        let mut sink = RecordSink { dataset: &dataset.name, item: stem, seed, records: Vec::new() };
        for &k in levels {
            let noisy = apply_noise(grid, &NoiseSpec::for_ndim(grid.ndim(), k, noise_seed))?;
            let perturbation = format!("k={k}");
            for (m, b) in methods.iter().zip(&base) {
                sink.distances(m, cfg, &perturbation, b, &m.run(&noisy, cfg)?)?;
            }
        }
        Ok(sink.records)
    })
}

fn rotation_label(spec: &RotationSpec, ndim: usize) -> String {
    if ndim == 3 {
        format!("az={},el={}", spec.azimuth, spec.elevation)
    } else {
        format!("angle={}", spec.angle2d)
    }
}

/// Distances between the skeleton of a rotated shape and the rotated
/// skeleton of the shape.
pub fn run_rotation_experiment(
    dataset: &Dataset,
    methods: &[MethodSpec],
    angles: &[RotationSpec],
    seed: u64,
    opts: &BenchOptions,
) -> Result<Vec<BenchmarkRecord>> {
    validate_methods(methods)?;
    angles.iter().try_for_each(RotationSpec::validate)?;
    let cfg = &opts.cpma;
    run_items(dataset, opts, |stem, grid| {
        let base = methods.iter().map(|m| m.run(grid, cfg)).collect::<Result<Vec<_>>>()?;
        let mut sink = RecordSink { dataset: &dataset.name, item: stem, seed, records: Vec::new() };
        for spec in angles {
            let rotated = rotate_grid(grid, spec);
            let label = rotation_label(spec, grid.ndim());
            for (m, b) in methods.iter().zip(&base) {
                let direct = m.run(&rotated, cfg)?;
                let moved = rotate_points(b, spec, grid.dims());
                sink.distances(m, cfg, &label, &direct, &moved)?;
            }
        }
        Ok(sink.records)
    })
}

/// Jaccard index between each shape and the reconstruction of its connected
/// CPMA, plus the raw surviving point count, for every `(scale, τ)` pair.
pub fn run_tau_sweep(
    dataset: &Dataset,
    taus: &[f64],
    scales: &[f64],
    seed: u64,
    opts: &BenchOptions,
) -> Result<Vec<BenchmarkRecord>> {
    if let Some(t) = taus.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::Parameter(format!("tau must be in (0, 1), got {t}")));
    }
    if let Some(s) = scales.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::Parameter(format!("scale must be positive, got {s}")));
    }
    run_items(dataset, opts, |stem, grid| {
        let mut sink = RecordSink { dataset: &dataset.name, item: stem, seed, records: Vec::new() };
        for &scale in scales {
            let shape = if scale == 1.0 { grid.clone() } else { scale_grid(grid, scale) };
            let field = score_function(&shape, &opts.cpma)?;
            let perturbation = format!("scale={scale}");
            for &tau in taus {
                let cfg = CpmaConfig { tau, ..opts.cpma };
                let raw = threshold_score(&shape, &field, tau)?;
                let connected = connect_cpma(&raw, &field, &shape, &cfg)?;
                let rec = reconstruct(&connected.mat, shape.dims());
                let params = format!("tau={tau}");
                sink.push("ccpma", &params, &perturbation, Metric::Jaccard, jaccard(&rec, &shape)?);
                sink.push("ccpma", &params, &perturbation, Metric::Points, raw.len() as f64);
            }
        }
        Ok(sink.records)
    })
}
