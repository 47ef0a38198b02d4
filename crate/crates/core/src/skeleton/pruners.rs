//! Projection- and scale-based filters over the discrete medial axis.

use crate::distfield::{edt, DistanceField};
use crate::grid::{BinaryGrid, Connectivity, GridPoint, MedialAxisTransform};

use super::mat::{extract_mat, extract_mat_with, reconstruct};

fn neighbor_points(p: GridPoint, ndim: usize) -> impl Iterator<Item = GridPoint> {
    Connectivity::Full
        .offsets(ndim)
        .into_iter()
        .map(move |o| p.offset(o))
}

/// Integer medial axis filter: an axis point survives when the feature
/// points of some lattice neighbor lie at least `gamma` apart from its own.
pub fn gima(grid: &BinaryGrid, gamma: f64) -> MedialAxisTransform {
    let field = edt(grid);
    let mat = extract_mat_with_frame(grid, &field);
    let dims = grid.dims();
    let gamma2 = gamma * gamma;
    mat.filter(|i, _| {
        let fx = field.feature_point(i);
        neighbor_points(dims.point(i), dims.ndim()).any(|q| match dims.checked_index(q.coords) {
            Some(j) => (fx.dist2(&field.feature_point(j)) as f64) >= gamma2 - 1e-9,
            None => false,
        })
    })
}

/// Bisector angle filter: an axis point survives when the angle at `x`
/// between its feature point and a neighbor's feature point reaches `theta`
/// degrees.
pub fn bema(grid: &BinaryGrid, theta: f64) -> MedialAxisTransform {
    let field = edt(grid);
    let mat = extract_mat_with_frame(grid, &field);
    let dims = grid.dims();
    mat.filter(|i, _| {
        let p = dims.point(i);
        let fx = field.feature_point(i);
        let max_angle = neighbor_points(p, dims.ndim())
            .filter_map(|q| dims.checked_index(q.coords))
            .map(|j| angle_deg(p, fx, field.feature_point(j)))
            .fold(0.0, f64::max);
        max_angle >= theta - 1e-9
    })
}

fn angle_deg(at: GridPoint, a: GridPoint, b: GridPoint) -> f64 {
    let u: Vec<f64> = (0..3).map(|k| (a.coords[k] - at.coords[k]) as f64).collect();
    let v: Vec<f64> = (0..3).map(|k| (b.coords[k] - at.coords[k]) as f64).collect();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    let cos = u.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() / (nu * nv);
    cos.clamp(-1.0, 1.0).acos().to_degrees()
}

/// Scale axis: grow every axis ball by `scale`, take the medial axis of the
/// grown union, and keep the points inside the original shape.
pub fn sat(grid: &BinaryGrid, scale: f64) -> MedialAxisTransform {
    let field = edt(grid);
    let mat = extract_mat_with_frame(grid, &field);
    let dims = grid.dims();
    let max_r = mat.radii().iter().copied().fold(0.0, f64::max);
    let margin = ((scale - 1.0) * max_r).ceil().max(0.0) as usize + 1;
    let big_dims = dims.grown(margin);
    let m = margin;
    let shift = [m, m, if dims.ndim() == 3 { m } else { 0 }];
    let scaled = MedialAxisTransform::from_pairs(
        big_dims,
        mat.indices().iter().zip(mat.radii()).map(|(&i, &r)| {
            let c = dims.coords(i);
            (
                big_dims.index([c[0] + shift[0], c[1] + shift[1], c[2] + shift[2]]),
                r * scale,
            )
        }),
    );
    let grown = reconstruct(&scaled, big_dims);
    let axis = extract_mat(&grown);
    let kept = axis.indices().iter().filter_map(|&j| {
        let c = big_dims.coords(j);
        let back = [
            c[0] as i64 - shift[0] as i64,
            c[1] as i64 - shift[1] as i64,
            c[2] as i64 - shift[2] as i64,
        ];
        dims.checked_index(back).filter(|&i| grid.get(i))
    });
    MedialAxisTransform::from_indices(dims, kept, |i| field.dist(i))
}

/// Scale-filtered axis: drop an axis point whose ball, scaled by `scale`,
/// fits inside another scaled axis ball.
pub fn sfema(grid: &BinaryGrid, scale: f64) -> MedialAxisTransform {
    let field = edt(grid);
    let mat = extract_mat_with_frame(grid, &field);
    let pts = mat.points();
    let radii = mat.radii();
    let keep: Vec<bool> = (0..pts.len())
        .map(|a| {
            !(0..pts.len()).any(|b| {
                b != a && pts[a].dist(&pts[b]) + scale * radii[a] <= scale * radii[b] + 1e-9
            })
        })
        .collect();
    let mut k = 0;
    mat.filter(|_, _| {
        let v = keep[k];
        k += 1;
        v
    })
}

fn extract_mat_with_frame(grid: &BinaryGrid, field: &DistanceField) -> MedialAxisTransform {
    if grid.touches_border() {
        extract_mat(grid)
    } else {
        extract_mat_with(grid, field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dims;

    fn plus_shape() -> BinaryGrid {
        BinaryGrid::from_fn(Dims::new2(31, 25), |c| {
            let (x, y) = (c[0] as i64 - 15, c[1] as i64 - 12);
            (x * x + y * y < 81) || (x.abs() < 13 && y.abs() < 3) || (x == 9 && y == -9)
        })
    }

    #[test]
    fn sat_unit_scale_is_identity() {
        let g = plus_shape();
        assert_eq!(sat(&g, 1.0), extract_mat(&g));
    }

    #[test]
    fn gima_is_monotone() {
        let g = plus_shape();
        let all = extract_mat(&g);
        assert_eq!(gima(&g, 0.0), all);
        let mut prev = all;
        for gamma in [1.0, 2.0, 3.0, 5.0, 8.0] {
            let cur = gima(&g, gamma);
            assert!(cur.indices().iter().all(|&i| prev.contains(i)));
            prev = cur;
        }
    }

    #[test]
    fn bema_is_monotone() {
        let g = plus_shape();
        let mut prev = bema(&g, 0.0);
        assert_eq!(prev, extract_mat(&g));
        for theta in [30.0, 60.0, 90.0, 120.0, 150.0] {
            let cur = bema(&g, theta);
            assert!(cur.indices().iter().all(|&i| prev.contains(i)));
            prev = cur;
        }
    }

    #[test]
    fn sfema_subset_and_monotone() {
        let g = plus_shape();
        let all = extract_mat(&g);
        let a = sfema(&g, 1.2);
        let b = sfema(&g, 1.6);
        assert!(a.indices().iter().all(|&i| all.contains(i)));
        assert!(b.indices().iter().all(|&i| a.contains(i)));
        assert!(b.len() < all.len());
    }

    #[test]
    fn sat_stays_inside_shape() {
        let g = plus_shape();
        let s = sat(&g, 1.3);
        assert!(s.indices().iter().all(|&i| g.get(i)));
        assert!(!s.is_empty());
    }
}
