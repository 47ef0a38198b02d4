//! Discrete medial axis transform and union-of-balls reconstruction.
//!
//! The digital ball of a cell `x` with radius `D(x)` is every lattice cell
//! strictly closer than `D(x)`, together with `x` itself. Its tight radius
//! `R(x)` is the largest lattice distance actually realized inside it. A cell
//! is dropped from the axis when some other cell `y` satisfies
//! `|x - y| + R(x) <= R(y)`, which implies digital containment of the balls.
//! The comparison runs exactly on integer squared lengths.

use rayon::prelude::*;

use crate::distfield::{edt, DistanceField};
use crate::grid::{BinaryGrid, Dims, MedialAxisTransform};

/// `tight[d2]` is the largest squared lattice length strictly below `d2`
/// (and 0 for `d2 <= 1`).
pub(crate) fn tight_radius_table(max_d2: i64, ndim: usize) -> Vec<i64> {
    let n = max_d2.max(1) as usize + 1;
    let mut representable = vec![false; n];
    let r = crate::distfield::isqrt(max_d2) + 1;
    let zr = if ndim == 3 { r } else { 0 };
    for a in 0..=r {
        for b in 0..=r {
            for c in 0..=zr {
                let s = (a * a + b * b + c * c) as usize;
                if s < n {
                    representable[s] = true;
                }
            }
        }
    }
    let mut tight = vec![0i64; n];
    let mut last = 0i64;
    for (d2, t) in tight.iter_mut().enumerate() {
        *t = last;
        if representable[d2] {
            last = d2 as i64;
        }
    }
    tight
}

/// `sqrt(a) + sqrt(b) <= sqrt(c)` on non-negative integers, evaluated exactly.
#[inline]
pub(crate) fn ball_contained(a: i64, b: i64, c: i64) -> bool {
    let slack = c - a - b;
    slack >= 0 && 4 * (a as i128) * (b as i128) <= (slack as i128) * (slack as i128)
}

/// Chebyshev shell of radius `k`: offsets whose max-norm is exactly `k`.
fn shell(k: i64, ndim: usize) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    let zr = if ndim == 3 { k } else { 0 };
    for dz in -zr..=zr {
        for dy in -k..=k {
            if dz.abs() == k || dy.abs() == k {
                for dx in -k..=k {
                    out.push([dx, dy, dz]);
                }
            } else {
                out.push([-k, dy, dz]);
                out.push([k, dy, dz]);
            }
        }
    }
    out
}

/// Medial axis transform of the foreground.
pub fn extract_mat(grid: &BinaryGrid) -> MedialAxisTransform {
    if grid.is_blank() {
        return MedialAxisTransform::empty(grid.dims());
    }
    let needs_frame = grid.touches_border() || grid.dims().extents().iter().any(|&e| e < 3);
    if needs_frame {
        // cells outside the frame act as background
        let padded = grid.pad(1);
        let inner = extract_mat_with(&padded, &edt(&padded));
        let pd = padded.dims();
        let dims = grid.dims();
        let shift = if dims.ndim() == 3 { [1, 1, 1] } else { [1, 1, 0] };
        return MedialAxisTransform::from_pairs(
            dims,
            inner.indices().iter().zip(inner.radii()).map(|(&i, &r)| {
                let c = pd.coords(i);
                (dims.index([c[0] - shift[0], c[1] - shift[1], c[2] - shift[2]]), r)
            }),
        );
    }
    extract_mat_with(grid, &edt(grid))
}

/// Medial axis of a grid that has background on its frame, reusing a
/// precomputed distance field.
pub fn extract_mat_with(grid: &BinaryGrid, field: &DistanceField) -> MedialAxisTransform {
    let dims = grid.dims();
    let ndim = dims.ndim();
    let max_d2 = field.max_dist2();
    let tight = tight_radius_table(max_d2, ndim);
    let tight_of = |i: usize| tight[field.dist2(i) as usize];
    let max_tight = grid
        .foreground_indices()
        .iter()
        .map(|&i| tight_of(i))
        .max()
        .unwrap_or(0);
    let max_r = (max_tight as f64).sqrt();
    let k_limit = max_r.floor() as i64 + 1;
    let shells: Vec<Vec<[i64; 3]>> = (0..=k_limit).map(|k| shell(k, ndim)).collect();

    let keep: Vec<usize> = grid
        .foreground_indices()
        .into_par_iter()
        .filter(|&i| {
            let b = tight_of(i);
            let rx = (b as f64).sqrt();
            let p = dims.point(i);
            let k_max = ((max_r - rx) + 1e-9).floor() as i64;
            for shell in shells.iter().take(k_max as usize + 1).skip(1) {
                for o in shell {
                    let q = p.offset(*o);
                    let Some(j) = dims.checked_index(q.coords) else {
                        continue;
                    };
                    if !grid.get(j) {
                        continue;
                    }
                    let c = tight_of(j);
                    if c <= b {
                        continue;
                    }
                    let a = o[0] * o[0] + o[1] * o[1] + o[2] * o[2];
                    if ball_contained(a, b, c) {
                        return false;
                    }
                }
            }
            true
        })
        .collect();

    MedialAxisTransform::from_indices(dims, keep, |i| field.dist(i))
}

#[inline]
fn in_ball(d2: i64, radius: f64) -> bool {
    d2 == 0 || (d2 as f64) < radius * radius - 1e-9
}

/// Union of the digital balls of every element.
pub fn reconstruct(mat: &MedialAxisTransform, dims: Dims) -> BinaryGrid {
    let mut out = BinaryGrid::empty(dims);
    let ndim = dims.ndim();
    for e in mat.elements() {
        let r = e.radius.max(0.0).ceil() as i64;
        let zr = if ndim == 3 { r } else { 0 };
        for dz in -zr..=zr {
            for dy in -r..=r {
                for dx in -r..=r {
                    if !in_ball(dx * dx + dy * dy + dz * dz, e.radius) {
                        continue;
                    }
                    if let Some(j) = dims.checked_index(e.point.offset([dx, dy, dz]).coords) {
                        out.set(j, true);
                    }
                }
            }
        }
    }
    out
}
