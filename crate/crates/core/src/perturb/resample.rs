//! Nearest-neighbor rotation and scaling of grids and point sets.

use serde::{Deserialize, Serialize};

use crate::grid::{BinaryGrid, Dims, MedialAxisTransform};

/// Rotation angles in degrees. 2D grids use `angle2d` (counterclockwise in
/// the x/y plane); 3D grids rotate by `elevation` about y, then `azimuth`
/// about z.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec {
    pub angle2d: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

type Mat3 = [[f64; 3]; 3];

/// `(cos, sin)` of an angle in degrees, exact at multiples of 90.
fn cos_sin(deg: f64) -> (f64, f64) {
    let q = deg / 90.0;
    if q == q.round() {
        match (q.round() as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        let r = deg.to_radians();
        (r.cos(), r.sin())
    }
}

fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

impl RotationSpec {
    pub fn planar(deg: f64) -> Self {
        Self { angle2d: deg, ..Self::default() }
    }

    pub fn spatial(azimuth: f64, elevation: f64) -> Self {
        Self { azimuth, elevation, ..Self::default() }
    }

    /// The experiment protocol only uses angles in `[0, 90]`.
    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [
            ("angle", self.angle2d),
            ("azimuth", self.azimuth),
            ("elevation", self.elevation),
        ] {
            if !(0.0..=90.0).contains(&v) {
                return Err(crate::Error::Parameter(format!(
                    "{name} must be in [0, 90] degrees, got {v}"
                )));
            }
        }
        Ok(())
    }

    fn matrix(&self, ndim: usize) -> Mat3 {
        if ndim == 2 {
            let (c, s) = cos_sin(self.angle2d);
            [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
        } else {
            let (ca, sa) = cos_sin(self.azimuth);
            let (ce, se) = cos_sin(self.elevation);
            let rz = [[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]];
            let ry = [[ce, 0.0, se], [0.0, 1.0, 0.0], [-se, 0.0, ce]];
            mul(&rz, &ry)
        }
    }
}

fn is_lattice_map(m: &Mat3) -> bool {
    m.iter().flatten().all(|v| *v == 0.0 || v.abs() == 1.0)
}

/// Canvas large enough to hold the rotated grid. Each extent has the parity
/// of the source axis it is mostly aligned with, so centered quarter turns
/// land exactly on lattice points; non-lattice rotations get one extra cell
/// of margin on each side.
pub fn rotation_canvas(dims: Dims, spec: &RotationSpec) -> Dims {
    let nd = dims.ndim();
    let m = spec.matrix(nd);
    let n = dims.raw();
    let mut ext = [1usize; 3];
    for i in 0..nd {
        let bound: f64 = (0..nd).map(|j| m[i][j].abs() * (n[j] as f64 - 1.0)).sum::<f64>() + 1.0;
        let mut e = (bound - 1e-9).ceil().max(1.0) as usize;
        let dominant = (0..nd)
            .max_by(|&a, &b| m[i][a].abs().total_cmp(&m[i][b].abs()).then(b.cmp(&a)))
            .unwrap_or(i);
        if (e + n[dominant]) % 2 == 1 {
            e += 1;
        }
        if !is_lattice_map(&m) {
            e += 2;
        }
        ext[i] = e;
    }
    if nd == 2 {
        Dims::new2(ext[0], ext[1])
    } else {
        Dims::new3(ext[0], ext[1], ext[2])
    }
}

fn center(dims: Dims) -> [f64; 3] {
    let n = dims.raw();
    [
        (n[0] as f64 - 1.0) / 2.0,
        (n[1] as f64 - 1.0) / 2.0,
        (n[2] as f64 - 1.0) / 2.0,
    ]
}

/// Rotates a grid about its center onto the canvas from [`rotation_canvas`],
/// sampling the source by nearest neighbor. The output keeps the canvas
/// dimensions so it stays aligned with [`rotate_points`].
pub fn rotate_grid(grid: &BinaryGrid, spec: &RotationSpec) -> BinaryGrid {
    let src = grid.dims();
    let dst = rotation_canvas(src, spec);
    let m = spec.matrix(src.ndim());
    let (c, c2) = (center(src), center(dst));
    BinaryGrid::from_fn(dst, |p| {
        let d = [
            p[0] as f64 - c2[0],
            p[1] as f64 - c2[1],
            p[2] as f64 - c2[2],
        ];
        // inverse of a rotation is its transpose
        let mut q = [0i64; 3];
        for j in 0..3 {
            let v: f64 = (0..3).map(|i| m[i][j] * d[i]).sum::<f64>() + c[j];
            q[j] = v.round() as i64;
        }
        grid.get_at(q)
    })
}

/// Maps skeleton points of a grid with dimensions `dims` onto the rotated
/// canvas, keeping radii. Points falling outside the canvas are dropped.
pub fn rotate_points(
    mat: &MedialAxisTransform,
    spec: &RotationSpec,
    dims: Dims,
) -> MedialAxisTransform {
    let dst = rotation_canvas(dims, spec);
    let m = spec.matrix(dims.ndim());
    let (c, c2) = (center(dims), center(dst));
    let pairs = mat.elements().filter_map(|e| {
        let d = [
            e.point.coords[0] as f64 - c[0],
            e.point.coords[1] as f64 - c[1],
            e.point.coords[2] as f64 - c[2],
        ];
        let mut q = [0i64; 3];
        for i in 0..3 {
            let v: f64 = (0..3).map(|j| m[i][j] * d[j]).sum::<f64>() + c2[i];
            q[i] = v.round() as i64;
        }
        dst.checked_index(q).map(|idx| (idx, e.radius))
    });
    MedialAxisTransform::from_pairs(dst, pairs.collect::<Vec<_>>())
}

/// Nearest-neighbor rescale by `factor` along every axis.
pub fn scale_grid(grid: &BinaryGrid, factor: f64) -> BinaryGrid {
    let src = grid.dims();
    let n = src.raw();
    let nd = src.ndim();
    let mut ext = [1usize; 3];
    for a in 0..nd {
        ext[a] = ((n[a] as f64 * factor).round() as usize).max(1);
    }
    let dst = if nd == 2 {
        Dims::new2(ext[0], ext[1])
    } else {
        Dims::new3(ext[0], ext[1], ext[2])
    };
    BinaryGrid::from_fn(dst, |p| {
        let mut q = [0i64; 3];
        for a in 0..nd {
            q[a] = (((p[a] as f64 + 0.5) / factor).floor() as i64).min(n[a] as i64 - 1);
        }
        grid.get_at(q)
    })
    .ensure_padded()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Connectivity, GridPoint};
    use crate::metrics::jaccard;

    #[test]
    fn quarter_turn_of_points() {
        let dims = Dims::new2(41, 41);
        let mat = MedialAxisTransform::from_pairs(
            dims,
            [(dims.index([10, 20, 0]), 3.0), (dims.index([20, 20, 0]), 5.0)],
        );
        let rot = rotate_points(&mat, &RotationSpec::planar(90.0), dims);
        assert_eq!(rot.dims(), dims);
        let got: Vec<_> = rot.elements().map(|e| (e.point, e.radius)).collect();
        assert_eq!(
            got,
            vec![(GridPoint::new2(20, 10), 3.0), (GridPoint::new2(20, 20), 5.0)]
        );
    }

    #[test]
    fn quarter_turn_of_grid_matches_symmetry() {
        let dims = Dims::new2(9, 6);
        let g = BinaryGrid::from_fn(dims, |p| p[0] >= 1 && p[0] <= 6 && p[1] >= 1 && p[1] <= 2 || (p[0] == 2 && p[1] < 5 && p[1] > 0));
        let r = rotate_grid(&g, &RotationSpec::planar(90.0));
        let s = crate::grid::Symmetry::rot90().apply_grid(&g);
        assert_eq!(r, s);
    }

    #[test]
    fn canvas_holds_rotated_shape() {
        let dims = Dims::new2(40, 20);
        let c = rotation_canvas(dims, &RotationSpec::planar(30.0));
        assert!(c.extent(0) >= 45 && c.extent(1) >= 36);
        assert_eq!(rotation_canvas(dims, &RotationSpec::planar(0.0)), dims);
        let d3 = Dims::new3(10, 12, 14);
        assert_eq!(rotation_canvas(d3, &RotationSpec::spatial(90.0, 0.0)), Dims::new3(12, 10, 14));
    }

    #[test]
    fn rotation_round_trip_preserves_disc() {
        let n = 64;
        let dims = Dims::new2(n, n);
        let g = BinaryGrid::from_fn(dims, |p| {
            let (x, y) = (p[0] as f64 - 31.5, p[1] as f64 - 31.5);
            x * x + (y * 1.4) * (y * 1.4) <= 400.0
        });
        let fwd = rotate_grid(&g, &RotationSpec::planar(30.0));
        let back = rotate_grid(&fwd, &RotationSpec::planar(-30.0));
        let bd = back.dims();
        let origin = [
            (bd.extent(0) as i64 - n as i64) / 2,
            (bd.extent(1) as i64 - n as i64) / 2,
            0,
        ];
        let cropped = back.crop(origin, dims);
        assert!(jaccard(&g, &cropped).unwrap() >= 0.95);
        assert_eq!(fwd.components(Connectivity::Full).len(), 1);
    }

    #[test]
    fn scaling_doubles_extent() {
        let g = BinaryGrid::from_fn(Dims::new2(10, 10), |p| (2..8).contains(&p[0]) && (3..7).contains(&p[1]));
        let s = scale_grid(&g, 2.0);
        assert_eq!(s.dims(), Dims::new2(20, 20));
        assert_eq!(s.count(), 4 * g.count());
    }

    #[test]
    fn angle_range_validation() {
        assert!(RotationSpec::planar(45.0).validate().is_ok());
        assert!(RotationSpec::planar(120.0).validate().is_err());
    }
}
