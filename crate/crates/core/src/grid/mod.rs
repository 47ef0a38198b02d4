//! Occupancy grids, lattice points and the per-cell containers built on top
//! of them.
//!
//! Every grid is stored row-major with the x axis fastest. Two-dimensional
//! grids are carried as three-dimensional ones with a unit z extent, so the
//! algorithms downstream can share a single indexing scheme.

mod io;
mod symmetry;
pub(crate) mod topology;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{load_grid, read_grid, save_grid, write_grid, GridFormat};
pub use symmetry::Symmetry;
pub use topology::Connectivity;

/// Extent of a 2D or 3D lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    extent: [usize; 3],
    ndim: usize,
}

impl Dims {
    pub fn new2(nx: usize, ny: usize) -> Self {
        Self {
            extent: [nx, ny, 1],
            ndim: 2,
        }
    }

    pub fn new3(nx: usize, ny: usize, nz: usize) -> Self {
        Self {
            extent: [nx, ny, nz],
            ndim: 3,
        }
    }

    pub fn from_slice(extents: &[usize]) -> Result<Self> {
        match *extents {
            [nx, ny] => Ok(Self::new2(nx, ny)),
            [nx, ny, nz] => Ok(Self::new3(nx, ny, nz)),
            _ => Err(Error::Dimension(format!(
                "expected 2 or 3 axes, got {}",
                extents.len()
            ))),
        }
    }

    #[inline]
    pub fn ndim(&self) -> usize {
        self.ndim
    }

    /// Extent along `axis`; axes beyond `ndim` report 1.
    #[inline]
    pub fn extent(&self, axis: usize) -> usize {
        self.extent[axis]
    }

    pub fn extents(&self) -> &[usize] {
        &self.extent[..self.ndim]
    }

    #[inline]
    pub fn raw(&self) -> [usize; 3] {
        self.extent
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.extent[0] * self.extent[1] * self.extent[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest axis extent, the `M` of an `M x M` image.
    pub fn max_extent(&self) -> usize {
        self.extents().iter().copied().max().unwrap_or(0)
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => 1,
            1 => self.extent[0],
            _ => self.extent[0] * self.extent[1],
        }
    }

    #[inline]
    pub fn index(&self, c: [usize; 3]) -> usize {
        c[0] + self.extent[0] * (c[1] + self.extent[1] * c[2])
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let x = idx % self.extent[0];
        let rest = idx / self.extent[0];
        [x, rest % self.extent[1], rest / self.extent[1]]
    }

    #[inline]
    pub fn contains(&self, c: [i64; 3]) -> bool {
        (0..3).all(|a| c[a] >= 0 && (c[a] as usize) < self.extent[a])
    }

    /// Linear index of a signed coordinate, if it lies inside the lattice.
    #[inline]
    pub fn checked_index(&self, c: [i64; 3]) -> Option<usize> {
        self.contains(c)
            .then(|| self.index([c[0] as usize, c[1] as usize, c[2] as usize]))
    }

    pub fn point(&self, idx: usize) -> GridPoint {
        let c = self.coords(idx);
        GridPoint::new([c[0] as i64, c[1] as i64, c[2] as i64])
    }

    /// Dims grown by `margin` cells on both sides of every active axis.
    pub fn grown(&self, margin: usize) -> Self {
        let mut extent = self.extent;
        for e in extent.iter_mut().take(self.ndim) {
            *e += 2 * margin;
        }
        Self {
            extent,
            ndim: self.ndim,
        }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.extents().iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Integer lattice coordinates. Unused trailing axes are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint {
    pub coords: [i64; 3],
}

impl GridPoint {
    pub const fn new(coords: [i64; 3]) -> Self {
        Self { coords }
    }

    pub const fn new2(x: i64, y: i64) -> Self {
        Self { coords: [x, y, 0] }
    }

    pub fn dist2(&self, other: &GridPoint) -> i64 {
        (0..3)
            .map(|a| {
                let d = self.coords[a] - other.coords[a];
                d * d
            })
            .sum()
    }

    pub fn dist(&self, other: &GridPoint) -> f64 {
        (self.dist2(other) as f64).sqrt()
    }

    pub fn offset(&self, by: [i64; 3]) -> GridPoint {
        GridPoint::new([
            self.coords[0] + by[0],
            self.coords[1] + by[1],
            self.coords[2] + by[2],
        ])
    }
}

/// Boolean occupancy grid; `true` cells belong to the shape.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryGrid {
    dims: Dims,
    data: Vec<bool>,
}

impl fmt::Debug for BinaryGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BinaryGrid")
            .field("dims", &self.dims)
            .field("foreground", &self.count())
            .finish()
    }
}

impl BinaryGrid {
    pub fn empty(dims: Dims) -> Self {
        Self {
            dims,
            data: vec![false; dims.len()],
        }
    }

    pub fn from_data(dims: Dims, data: Vec<bool>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::Dimension(format!(
                "data length {} does not match dims {dims}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    /// Builds a grid by evaluating `f` at every cell coordinate.
    pub fn from_fn(dims: Dims, mut f: impl FnMut([usize; 3]) -> bool) -> Self {
        let data = (0..dims.len()).map(|i| f(dims.coords(i))).collect();
        Self { dims, data }
    }

    pub fn from_indices(dims: Dims, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut grid = Self::empty(dims);
        for i in indices {
            grid.data[i] = true;
        }
        grid
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn ndim(&self) -> usize {
        self.dims.ndim()
    }

    #[inline]
    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, idx: usize) -> bool {
        self.data[idx]
    }

    #[inline]
    pub fn set(&mut self, idx: usize, value: bool) {
        self.data[idx] = value;
    }

    /// Value at a signed coordinate; cells outside the lattice read as background.
    #[inline]
    pub fn get_at(&self, c: [i64; 3]) -> bool {
        self.dims.checked_index(c).is_some_and(|i| self.data[i])
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_blank(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn foreground_indices(&self) -> Vec<usize> {
        self.data
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// The set of foreground lattice points, in linear-index order.
    pub fn foreground_points(&self) -> Vec<GridPoint> {
        self.foreground_indices()
            .into_iter()
            .map(|i| self.dims.point(i))
            .collect()
    }

    pub fn is_border(&self, idx: usize) -> bool {
        let c = self.dims.coords(idx);
        (0..self.ndim()).any(|a| c[a] == 0 || c[a] + 1 == self.dims.extent(a))
    }

    /// True if any foreground cell lies on the outer frame.
    pub fn touches_border(&self) -> bool {
        self.data
            .iter()
            .enumerate()
            .any(|(i, &b)| b && self.is_border(i))
    }

    /// Clears every cell on the outer frame.
    pub fn clear_border(&mut self) {
        for i in 0..self.data.len() {
            if self.data[i] && self.is_border(i) {
                self.data[i] = false;
            }
        }
    }

    /// Surrounds the grid with `margin` background cells on every active axis.
    pub fn pad(&self, margin: usize) -> Self {
        let dims = self.dims.grown(margin);
        let mut out = Self::empty(dims);
        let m = margin;
        let shift = [m, m, if self.ndim() == 3 { m } else { 0 }];
        for (i, &b) in self.data.iter().enumerate() {
            if b {
                let c = self.dims.coords(i);
                out.data[dims.index([c[0] + shift[0], c[1] + shift[1], c[2] + shift[2]])] = true;
            }
        }
        out
    }

    /// Pads by one cell only when the foreground touches the frame, so that
    /// applying it twice is the same as applying it once.
    pub fn ensure_padded(self) -> Self {
        let small = self.dims.extents().iter().any(|&e| e < 3);
        if small || self.touches_border() {
            self.pad(1)
        } else {
            self
        }
    }

    /// Copies the window starting at `origin` with extent `dims`; cells
    /// outside the source read as background.
    pub fn crop(&self, origin: [i64; 3], dims: Dims) -> Self {
        Self::from_fn(dims, |c| {
            self.get_at([
                origin[0] + c[0] as i64,
                origin[1] + c[1] as i64,
                origin[2] + c[2] as i64,
            ])
        })
    }

    pub fn and(&self, other: &BinaryGrid) -> Result<BinaryGrid> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn or(&self, other: &BinaryGrid) -> Result<BinaryGrid> {
        self.zip_with(other, |a, b| a || b)
    }

    fn zip_with(&self, other: &BinaryGrid, f: impl Fn(bool, bool) -> bool) -> Result<BinaryGrid> {
        if self.dims != other.dims {
            return Err(Error::Parameter(format!(
                "grid dims differ: {} vs {}",
                self.dims, other.dims
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(BinaryGrid {
            dims: self.dims,
            data,
        })
    }

    /// Number of foreground cells with at least one face-adjacent background
    /// cell (cells outside the frame count as background).
    pub fn boundary_count(&self) -> usize {
        let offsets = Connectivity::Face.offsets(self.ndim());
        self.foreground_indices()
            .into_iter()
            .filter(|&i| {
                let p = self.dims.point(i);
                offsets.iter().any(|&o| !self.get_at(p.offset(o).coords))
            })
            .count()
    }
}

/// One `(x, r)` pair of a medial axis transform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatElement {
    pub point: GridPoint,
    pub radius: f64,
}

/// A set of lattice points with ball radii, ordered by linear index.
#[derive(Clone, Debug, PartialEq)]
pub struct MedialAxisTransform {
    dims: Dims,
    indices: Vec<usize>,
    radii: Vec<f64>,
}

impl MedialAxisTransform {
    pub fn empty(dims: Dims) -> Self {
        Self {
            dims,
            indices: Vec::new(),
            radii: Vec::new(),
        }
    }

    /// Builds from `(linear index, radius)` pairs. Duplicates keep the first
    /// radius seen.
    pub fn from_pairs(dims: Dims, pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut pairs: Vec<(usize, f64)> = pairs.into_iter().collect();
        pairs.sort_by_key(|&(i, _)| i);
        pairs.dedup_by_key(|&mut (i, _)| i);
        let (indices, radii) = pairs.into_iter().unzip();
        Self {
            dims,
            indices,
            radii,
        }
    }

    /// Builds from linear indices, reading each radius from `radius_of`.
    pub fn from_indices(
        dims: Dims,
        indices: impl IntoIterator<Item = usize>,
        radius_of: impl Fn(usize) -> f64,
    ) -> Self {
        Self::from_pairs(dims, indices.into_iter().map(|i| (i, radius_of(i))))
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.indices.binary_search(&idx).is_ok()
    }

    pub fn radius_at(&self, idx: usize) -> Option<f64> {
        self.indices
            .binary_search(&idx)
            .ok()
            .map(|k| self.radii[k])
    }

    pub fn points(&self) -> Vec<GridPoint> {
        self.indices.iter().map(|&i| self.dims.point(i)).collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = MatElement> + '_ {
        self.indices
            .iter()
            .zip(&self.radii)
            .map(|(&i, &radius)| MatElement {
                point: self.dims.point(i),
                radius,
            })
    }

    /// Indicator grid of the element points.
    pub fn to_grid(&self) -> BinaryGrid {
        BinaryGrid::from_indices(self.dims, self.indices.iter().copied())
    }

    /// Keeps the elements whose linear index satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(usize, f64) -> bool) -> Self {
        let pairs = self
            .indices
            .iter()
            .zip(&self.radii)
            .filter(|(&i, &r)| keep(i, r))
            .map(|(&i, &r)| (i, r));
        Self::from_pairs(self.dims, pairs)
    }
}

/// Real-valued per-cell field with values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreField {
    dims: Dims,
    values: Vec<f64>,
}

impl ScoreField {
    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            values: vec![0.0; dims.len()],
        }
    }

    pub fn new(dims: Dims, values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.len() {
            return Err(Error::Dimension(format!(
                "field length {} does not match dims {dims}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("score {v} outside [0, 1]")));
        }
        Ok(Self { dims, values })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}
