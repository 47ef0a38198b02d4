//! Exact Euclidean distance transform with a feature (nearest background
//! cell) transform.
//!
//! Distances are carried as integer squared lengths through separable
//! lower-envelope passes, one axis at a time. The feature of a cell is the
//! nearest background cell with the smallest linear index, so results are
//! identical across runs and platforms.

use crate::grid::{BinaryGrid, Dims, GridPoint};

/// Squared distance stored for cells when the grid has no background at all.
pub const UNREACHABLE: i64 = i64::MAX;

#[derive(Clone, Debug)]
pub struct DistanceField {
    dims: Dims,
    dist2: Vec<i64>,
    feature: Vec<usize>,
}

impl DistanceField {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn dist2(&self, idx: usize) -> i64 {
        self.dist2[idx]
    }

    #[inline]
    pub fn dist(&self, idx: usize) -> f64 {
        (self.dist2[idx] as f64).sqrt()
    }

    pub fn dist2_values(&self) -> &[i64] {
        &self.dist2
    }

    /// Linear index of the representative nearest background cell.
    #[inline]
    pub fn feature(&self, idx: usize) -> usize {
        self.feature[idx]
    }

    pub fn feature_point(&self, idx: usize) -> GridPoint {
        self.dims.point(self.feature[idx])
    }

    pub fn max_dist2(&self) -> i64 {
        self.dist2
            .iter()
            .copied()
            .filter(|&d| d != UNREACHABLE)
            .max()
            .unwrap_or(0)
    }

    /// Every background cell at exactly the nearest distance from `idx`
    /// (the full projection set), in linear-index order.
    pub fn projection_set(&self, grid: &BinaryGrid, idx: usize) -> Vec<usize> {
        let d2 = self.dist2[idx];
        if d2 == 0 {
            return vec![idx];
        }
        if d2 == UNREACHABLE {
            return Vec::new();
        }
        let r = isqrt(d2) as i64;
        let p = self.dims.point(idx);
        let zr = if self.dims.ndim() == 3 { r } else { 0 };
        let mut out = Vec::new();
        for dz in -zr..=zr {
            for dy in -r..=r {
                for dx in -r..=r {
                    if dx * dx + dy * dy + dz * dz != d2 {
                        continue;
                    }
                    if let Some(j) = self.dims.checked_index(p.offset([dx, dy, dz]).coords) {
                        if !grid.get(j) {
                            out.push(j);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

pub(crate) fn isqrt(v: i64) -> i64 {
    if v <= 0 {
        return 0;
    }
    let mut r = (v as f64).sqrt() as i64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// Exact Euclidean distance transform of the foreground.
pub fn edt(grid: &BinaryGrid) -> DistanceField {
    let dims = grid.dims();
    let mut dist2 = vec![UNREACHABLE; dims.len()];
    let mut feature = vec![usize::MAX; dims.len()];

    // axis 0: nearest background within each row, ties to the left
    let nx = dims.extent(0);
    for row in 0..dims.len() / nx {
        let base = row * nx;
        let mut last: Option<usize> = None;
        for x in 0..nx {
            if !grid.get(base + x) {
                last = Some(x);
            }
            if let Some(l) = last {
                let d = (x - l) as i64;
                dist2[base + x] = d * d;
                feature[base + x] = base + l;
            }
        }
        let mut next: Option<usize> = None;
        for x in (0..nx).rev() {
            if !grid.get(base + x) {
                next = Some(x);
            }
            if let Some(n) = next {
                let d = (n - x) as i64;
                if d * d < dist2[base + x] {
                    dist2[base + x] = d * d;
                    feature[base + x] = base + n;
                }
            }
        }
    }

    for axis in 1..dims.ndim() {
        envelope_pass(dims, axis, &mut dist2, &mut feature);
    }

    DistanceField {
        dims,
        dist2,
        feature,
    }
}

fn envelope_pass(dims: Dims, axis: usize, dist2: &mut [i64], feature: &mut [usize]) {
    let n = dims.extent(axis);
    let stride = dims.stride(axis);
    let mut g = vec![0i64; n];
    let mut f = vec![0usize; n];
    let mut out_g = vec![0i64; n];
    let mut out_f = vec![0usize; n];
    let mut sites = vec![0usize; n];
    let mut bounds = vec![0f64; n + 1];
    let [ex, ey, ez] = dims.raw();
    for z in 0..ez {
        for y in 0..ey {
            for x in 0..ex {
                let c = [x, y, z];
                if c[axis] != 0 {
                    continue;
                }
                let base = dims.index(c);
                for k in 0..n {
                    g[k] = dist2[base + k * stride];
                    f[k] = feature[base + k * stride];
                }
                lower_envelope(&g, &f, &mut out_g, &mut out_f, &mut sites, &mut bounds);
                for k in 0..n {
                    dist2[base + k * stride] = out_g[k];
                    feature[base + k * stride] = out_f[k];
                }
            }
        }
    }
}

/// One-dimensional squared distance transform of sampled function `g`
/// (Felzenszwalb-Huttenlocher), followed by a tie-resolving feature scan.
fn lower_envelope(
    g: &[i64],
    f: &[usize],
    out_g: &mut [i64],
    out_f: &mut [usize],
    sites: &mut [usize],
    bounds: &mut [f64],
) {
    let n = g.len();
    let mut k: isize = -1;
    for q in 0..n {
        if g[q] == UNREACHABLE {
            continue;
        }
        let qv = g[q] as f64 + (q * q) as f64;
        loop {
            if k < 0 {
                k = 0;
                sites[0] = q;
                bounds[0] = f64::NEG_INFINITY;
                bounds[1] = f64::INFINITY;
                break;
            }
            let p = sites[k as usize];
            let pv = g[p] as f64 + (p * p) as f64;
            let s = (qv - pv) / (2.0 * (q - p) as f64);
            if s <= bounds[k as usize] {
                k -= 1;
                continue;
            }
            k += 1;
            sites[k as usize] = q;
            bounds[k as usize] = s;
            bounds[k as usize + 1] = f64::INFINITY;
            break;
        }
    }
    if k < 0 {
        out_g.fill(UNREACHABLE);
        out_f.fill(usize::MAX);
        return;
    }
    let mut j = 0usize;
    for q in 0..n {
        while bounds[j + 1] < q as f64 {
            j += 1;
        }
        let p = sites[j];
        let d = q as i64 - p as i64;
        out_g[q] = d * d + g[p];
    }
    // Several sites can reach the same minimum; keep the smallest feature.
    for q in 0..n {
        let best = out_g[q];
        let r = isqrt(best) as usize;
        let lo = q.saturating_sub(r);
        let hi = (q + r).min(n - 1);
        let mut feat = usize::MAX;
        for p in lo..=hi {
            if g[p] == UNREACHABLE {
                continue;
            }
            let d = q as i64 - p as i64;
            if d * d + g[p] == best && f[p] < feat {
                feat = f[p];
            }
        }
        out_f[q] = feat;
    }
}
