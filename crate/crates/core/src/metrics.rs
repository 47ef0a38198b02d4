//! Point-set distances (Hausdorff, Dubuisson-Jain) and the Jaccard index.
//!
//! Nearest-neighbor distances come from an exact distance transform of one
//! set's indicator on its bounding lattice; very sparse sets spread over a
//! large box fall back to pairwise search.

use crate::distfield::edt;
use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, Dims, GridPoint, MedialAxisTransform};

/// A nonempty-for-distances set of lattice points.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointSet {
    points: Vec<GridPoint>,
}

impl PointSet {
    pub fn new(mut points: Vec<GridPoint>) -> Self {
        points.sort_unstable();
        points.dedup();
        Self { points }
    }

    pub fn from_mat(mat: &MedialAxisTransform) -> Self {
        Self::new(mat.points())
    }

    pub fn from_grid(grid: &BinaryGrid) -> Self {
        Self::new(grid.foreground_points())
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn translated(&self, by: [i64; 3]) -> Self {
        Self::new(self.points.iter().map(|p| p.offset(by)).collect())
    }
}

/// For every point of `from`, the distance to its nearest point in `to`.
fn nearest_distances(from: &PointSet, to: &PointSet) -> Vec<f64> {
    let all = from.points.iter().chain(&to.points);
    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for p in all {
        for a in 0..3 {
            lo[a] = lo[a].min(p.coords[a]);
            hi[a] = hi[a].max(p.coords[a]);
        }
    }
    let ext: Vec<usize> = (0..3).map(|a| (hi[a] - lo[a] + 1) as usize).collect();
    let volume = ext[0].saturating_mul(ext[1]).saturating_mul(ext[2]);
    let pairs = from.len().saturating_mul(to.len());
    if volume > pairs.saturating_mul(4).max(1 << 12) {
        return from
            .points
            .iter()
            .map(|p| {
                to.points
                    .iter()
                    .map(|q| p.dist2(q))
                    .min()
                    .map_or(f64::INFINITY, |d| (d as f64).sqrt())
            })
            .collect();
    }
    let three_d = ext[2] > 1;
    let dims = if three_d {
        Dims::new3(ext[0], ext[1], ext[2])
    } else {
        Dims::new2(ext[0], ext[1])
    };
    let local = |p: &GridPoint| {
        dims.index([
            (p.coords[0] - lo[0]) as usize,
            (p.coords[1] - lo[1]) as usize,
            (p.coords[2] - lo[2]) as usize,
        ])
    };
    // `to` cells are the background whose distance we measure
    let mut grid = BinaryGrid::from_fn(dims, |_| true);
    for q in &to.points {
        grid.set(local(q), false);
    }
    let field = edt(&grid);
    from.points.iter().map(|p| field.dist(local(p))).collect()
}

fn require_nonempty(x: &PointSet, y: &PointSet) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Domain("distance between empty point sets".into()));
    }
    Ok(())
}

/// Symmetric Hausdorff distance.
pub fn hausdorff(x: &PointSet, y: &PointSet) -> Result<f64> {
    require_nonempty(x, y)?;
    let a = nearest_distances(x, y).into_iter().fold(0.0, f64::max);
    let b = nearest_distances(y, x).into_iter().fold(0.0, f64::max);
    Ok(a.max(b))
}

/// Dubuisson-Jain dissimilarity: the larger of the two mean nearest-point
/// distances.
pub fn dubuisson_jain(x: &PointSet, y: &PointSet) -> Result<f64> {
    require_nonempty(x, y)?;
    let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    Ok(mean(nearest_distances(x, y)).max(mean(nearest_distances(y, x))))
}

/// `|A & B| / |A | B|`, and 1 when both are empty.
pub fn jaccard(a: &BinaryGrid, b: &BinaryGrid) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::Parameter(format!(
            "jaccard needs equal dims, got {} and {}",
            a.dims(),
            b.dims()
        )));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&p, &q) in a.data().iter().zip(b.data()) {
        inter += usize::from(p && q);
        union += usize::from(p || q);
    }
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}
