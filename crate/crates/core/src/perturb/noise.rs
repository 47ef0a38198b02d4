//! Contour deformation (2D) and Eden accretion (3D).
//!
//! Randomness comes from `ChaCha8Rng` seeded with the spec's seed through
//! `SeedableRng::seed_from_u64`; the ChaCha stream is fixed by its
//! definition, so noisy shapes reproduce bit-for-bit on every platform.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::topology::Neighborhood;
use crate::grid::{BinaryGrid, Connectivity, GridPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseKind {
    Contour2D,
    Eden3D,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Number of times the single-level model is applied.
    pub level: usize,
    pub seed: u64,
    /// Per-contour-point deformation probability (2D).
    pub p_deform: f64,
    /// Contour samples on each side of a selected point that move with it (2D).
    pub neighborhood: usize,
    /// Voxels accreted per level (3D); `None` uses 1% of the boundary voxels.
    pub events_per_level: Option<usize>,
}

/// Deformation magnitudes are `|N(0, 1)|` scaled by this factor, in pixels.
const MAGNITUDE_SCALE: f64 = 2.0;

impl NoiseSpec {
    pub fn contour(level: usize, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Contour2D,
            level,
            seed,
            p_deform: 0.005,
            neighborhood: 2,
            events_per_level: None,
        }
    }

    pub fn eden(level: usize, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Eden3D,
            ..Self::contour(level, seed)
        }
    }

    /// The default model for a grid of the given dimensionality.
    pub fn for_ndim(ndim: usize, level: usize, seed: u64) -> Self {
        if ndim == 3 {
            Self::eden(level, seed)
        } else {
            Self::contour(level, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_deform > 0.0 && self.p_deform < 1.0) {
            return Err(Error::Parameter(format!(
                "p_deform must be in (0, 1), got {}",
                self.p_deform
            )));
        }
        if self.events_per_level == Some(0) {
            return Err(Error::Parameter("events_per_level must be >= 1".into()));
        }
        Ok(())
    }
}

/// Applies the single-level noise model `spec.level` times.
pub fn apply_noise(grid: &BinaryGrid, spec: &NoiseSpec) -> Result<BinaryGrid> {
    spec.validate()?;
    match (spec.kind, grid.ndim()) {
        (NoiseKind::Contour2D, 2) | (NoiseKind::Eden3D, 3) => {}
        (kind, n) => {
            return Err(Error::Parameter(format!(
                "{kind:?} noise does not apply to a {n}D grid"
            )))
        }
    }
    if grid.is_blank() {
        return Err(Error::Domain("empty shape".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut g = grid.clone();
    for _ in 0..spec.level {
        g = match spec.kind {
            NoiseKind::Contour2D => contour_level(&g, spec, &mut rng),
            NoiseKind::Eden3D => eden_level(&g, spec, &mut rng),
        };
    }
    Ok(g)
}

// clockwise starting west, with y growing downward
const MOORE: [[i64; 2]; 8] = [
    [-1, 0],
    [-1, -1],
    [0, -1],
    [1, -1],
    [1, 0],
    [1, 1],
    [0, 1],
    [-1, 1],
];

/// Ordered outer boundary of the component containing the first foreground
/// cell, by Moore-neighbor tracing.
pub fn trace_contour(grid: &BinaryGrid) -> Vec<GridPoint> {
    let Some(&start_idx) = grid.foreground_indices().first() else {
        return Vec::new();
    };
    let start = grid.dims().point(start_idx);
    let fg = |p: GridPoint| grid.get_at(p.coords);
    let mut contour = vec![start];
    let mut cur = start;
    // the west neighbor of the first cell in raster order is background
    let mut back = 0usize;
    let mut seen = HashSet::new();
    loop {
        if !seen.insert((cur, back)) {
            contour.pop();
            break;
        }
        let mut next = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let q = cur.offset([MOORE[d][0], MOORE[d][1], 0]);
            if fg(q) {
                next = Some((q, d));
                break;
            }
        }
        let Some((q, d)) = next else {
            break;
        };
        let bpos = cur.offset([MOORE[(d + 7) % 8][0], MOORE[(d + 7) % 8][1], 0]);
        let delta = [bpos.coords[0] - q.coords[0], bpos.coords[1] - q.coords[1]];
        back = MOORE.iter().position(|m| *m == delta).expect("backtrack cell is adjacent");
        cur = q;
        contour.push(cur);
    }
    contour
}

fn local_centroid(grid: &BinaryGrid, p: GridPoint) -> (f64, f64) {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0.0);
    for dy in -2..=2 {
        for dx in -2..=2 {
            if grid.get_at(p.offset([dx, dy, 0]).coords) {
                sx += dx as f64;
                sy += dy as f64;
                n += 1.0;
            }
        }
    }
    if n == 0.0 {
        (p.coords[0] as f64, p.coords[1] as f64)
    } else {
        (p.coords[0] as f64 + sx / n, p.coords[1] as f64 + sy / n)
    }
}

/// Unit outward normal at contour sample `i` from central differences.
fn outward_normal(grid: &BinaryGrid, contour: &[GridPoint], i: usize) -> (f64, f64) {
    let n = contour.len();
    let next = contour[(i + 1) % n];
    let prev = contour[(i + n - 1) % n];
    let tx = (next.coords[0] - prev.coords[0]) as f64;
    let ty = (next.coords[1] - prev.coords[1]) as f64;
    let p = contour[i];
    let (cx, cy) = local_centroid(grid, p);
    let (ox, oy) = (p.coords[0] as f64 - cx, p.coords[1] as f64 - cy);
    let (mut vx, mut vy) = (-ty, tx);
    if vx == 0.0 && vy == 0.0 {
        (vx, vy) = (ox, oy);
    }
    if vx * ox + vy * oy < 0.0 {
        vx = -vx;
        vy = -vy;
    }
    let len = (vx * vx + vy * vy).sqrt();
    if len == 0.0 {
        (0.0, -1.0)
    } else {
        (vx / len, vy / len)
    }
}

fn contour_level(grid: &BinaryGrid, spec: &NoiseSpec, rng: &mut ChaCha8Rng) -> BinaryGrid {
    let contour = trace_contour(grid);
    let n = contour.len();
    let mut out = grid.clone();
    let dims = grid.dims();
    for i in 0..n {
        if rng.random::<f64>() >= spec.p_deform {
            continue;
        }
        let outward: bool = rng.random();
        let lambda: f64 = rng.sample(StandardNormal);
        let radius = (MAGNITUDE_SCALE * lambda.abs()).ceil().max(1.0);
        let sign = if outward { 1.0 } else { -1.0 };
        let (nx, ny) = outward_normal(grid, &contour, i);
        let hood = spec.neighborhood as i64;
        for k in -hood..=hood {
            let j = (i as i64 + k).rem_euclid(n as i64) as usize;
            let p = contour[j];
            let cx = p.coords[0] as f64 + sign * nx;
            let cy = p.coords[1] as f64 + sign * ny;
            let r = radius.ceil() as i64 + 1;
            for y in (cy.round() as i64 - r)..=(cy.round() as i64 + r) {
                for x in (cx.round() as i64 - r)..=(cx.round() as i64 + r) {
                    let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                    if dx * dx + dy * dy > radius * radius {
                        continue;
                    }
                    if let Some(idx) = dims.checked_index([x, y, 0]) {
                        out.set(idx, outward);
                    }
                }
            }
        }
    }
    out.clear_border();
    let kept = out.largest_component(Connectivity::Full);
    if kept.is_blank() {
        grid.clone()
    } else {
        kept
    }
}

fn eden_level(grid: &BinaryGrid, spec: &NoiseSpec, rng: &mut ChaCha8Rng) -> BinaryGrid {
    let events = spec
        .events_per_level
        .unwrap_or_else(|| grid.boundary_count().div_ceil(100).max(1));
    let dims = grid.dims();
    let hood = Neighborhood::new(dims, Connectivity::Full);
    let mut out = grid.clone();
    let mut pos = vec![usize::MAX; dims.len()];
    let mut candidates: Vec<usize> = Vec::new();
    let eligible = |g: &BinaryGrid, i: usize| !g.get(i) && !g.is_border(i);

    let push = |i: usize, candidates: &mut Vec<usize>, pos: &mut Vec<usize>| {
        if pos[i] == usize::MAX {
            pos[i] = candidates.len();
            candidates.push(i);
        }
    };
    for i in 0..dims.len() {
        if eligible(&out, i) {
            let mut adjacent = false;
            hood.for_each(i, |j| adjacent |= out.get(j));
            if adjacent {
                push(i, &mut candidates, &mut pos);
            }
        }
    }
    for _ in 0..events {
        if candidates.is_empty() {
            break;
        }
        let k = rng.random_range(0..candidates.len());
        let cell = candidates.swap_remove(k);
        pos[cell] = usize::MAX;
        if k < candidates.len() {
            pos[candidates[k]] = k;
        }
        out.set(cell, true);
        let mut fresh = Vec::new();
        hood.for_each(cell, |j| {
            if eligible(&out, j) {
                fresh.push(j);
            }
        });
        for j in fresh {
            push(j, &mut candidates, &mut pos);
        }
    }
    out
}
