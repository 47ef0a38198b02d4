use super::{BinaryGrid, Dims, GridPoint, MedialAxisTransform, ScoreField};

/// An axis permutation combined with per-axis mirror flips: the exact
/// symmetries of the lattice (8 in 2D, 48 in 3D).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Symmetry {
    /// Output axis `a` reads source axis `perm[a]`.
    pub perm: [usize; 3],
    /// Output axis `a` is mirrored.
    pub flip: [bool; 3],
}

impl Symmetry {
    pub fn identity() -> Self {
        Self {
            perm: [0, 1, 2],
            flip: [false; 3],
        }
    }

    /// Every lattice symmetry for the given dimensionality.
    pub fn all(ndim: usize) -> Vec<Symmetry> {
        let perms: Vec<[usize; 3]> = if ndim == 2 {
            vec![[0, 1, 2], [1, 0, 2]]
        } else {
            vec![
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ]
        };
        let mut out = Vec::new();
        for perm in perms {
            for bits in 0..(1u8 << ndim) {
                let mut flip = [false; 3];
                for (a, f) in flip.iter_mut().enumerate().take(ndim) {
                    *f = bits & (1 << a) != 0;
                }
                out.push(Symmetry { perm, flip });
            }
        }
        out
    }

    /// Counterclockwise quarter turn in the x-y plane.
    pub fn rot90() -> Self {
        Self {
            perm: [1, 0, 2],
            flip: [true, false, false],
        }
    }

    pub fn apply_dims(&self, dims: Dims) -> Dims {
        let r = dims.raw();
        let e = [r[self.perm[0]], r[self.perm[1]], r[self.perm[2]]];
        if dims.ndim() == 2 {
            Dims::new2(e[0], e[1])
        } else {
            Dims::new3(e[0], e[1], e[2])
        }
    }

    /// Maps a source point into the transformed frame.
    pub fn apply_point(&self, p: GridPoint, dims: Dims) -> GridPoint {
        let mut out = [0i64; 3];
        for (a, o) in out.iter_mut().enumerate() {
            let src = self.perm[a];
            let v = p.coords[src];
            *o = if self.flip[a] {
                dims.extent(src) as i64 - 1 - v
            } else {
                v
            };
        }
        GridPoint::new(out)
    }

    fn map_index(&self, idx: usize, dims: Dims, out_dims: Dims) -> usize {
        let p = self.apply_point(dims.point(idx), dims);
        out_dims
            .checked_index(p.coords)
            .expect("symmetry maps lattice onto itself")
    }

    pub fn apply_grid(&self, grid: &BinaryGrid) -> BinaryGrid {
        let dims = grid.dims();
        let out_dims = self.apply_dims(dims);
        BinaryGrid::from_indices(
            out_dims,
            grid.foreground_indices()
                .into_iter()
                .map(|i| self.map_index(i, dims, out_dims)),
        )
    }

    pub fn apply_field(&self, field: &ScoreField) -> ScoreField {
        let dims = field.dims();
        let out_dims = self.apply_dims(dims);
        let mut values = vec![0.0; dims.len()];
        for (i, &v) in field.values().iter().enumerate() {
            values[self.map_index(i, dims, out_dims)] = v;
        }
        ScoreField::new(out_dims, values).expect("values already validated")
    }

    pub fn apply_mat(&self, mat: &MedialAxisTransform) -> MedialAxisTransform {
        let dims = mat.dims();
        let out_dims = self.apply_dims(dims);
        MedialAxisTransform::from_pairs(
            out_dims,
            mat.indices()
                .iter()
                .zip(mat.radii())
                .map(|(&i, &r)| (self.map_index(i, dims, out_dims), r)),
        )
    }
}
