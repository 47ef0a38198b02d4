//! Separable orthonormal DCT-II / DCT-III over 2D and 3D grids, and the
//! truncated low-pass reconstructions used to smooth a shape.
//!
//! Scaling is orthonormal on every axis, so the inverse of the forward
//! transform is the identity for any extent (not only square power-of-two
//! images).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, Dims};

/// Reconstructed values must clear the binarization threshold by this margin.
/// Cells whose exact value sits on the threshold then resolve to background
/// regardless of summation order, which keeps mirrored inputs mirrored.
pub const BIN_MARGIN: f64 = 1e-9;

/// Default threshold for binarizing a low-pass reconstruction.
pub const DEFAULT_BIN_THRESHOLD: f64 = 0.5;

/// DCT-II coefficients of a grid's 0/1 indicator field.
#[derive(Clone, Debug)]
pub struct SpectralField {
    dims: Dims,
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, freq: [usize; 3]) -> f64 {
        self.coeffs[self.dims.index(freq)]
    }
}

/// Orthonormal DCT-II basis, `basis[u * n + x]`.
fn basis(n: usize) -> Vec<f64> {
    let mut b = vec![0.0; n * n];
    let c0 = (1.0 / n as f64).sqrt();
    let c = (2.0 / n as f64).sqrt();
    for u in 0..n {
        let cu = if u == 0 { c0 } else { c };
        for x in 0..n {
            b[u * n + x] = cu * (PI * (2 * x + 1) as f64 * u as f64 / (2 * n) as f64).cos();
        }
    }
    b
}

enum Direction {
    Forward,
    /// Inverse using only the first `n` coefficients on the axis.
    Inverse(usize),
}

/// Transforms every line along `axis` whose coordinates on the other axes
/// satisfy `active`.
fn transform_axis(
    data: &mut [f64],
    dims: Dims,
    axis: usize,
    dir: &Direction,
    active: impl Fn([usize; 3]) -> bool,
) {
    let n = dims.extent(axis);
    if n == 1 {
        // single-sample orthonormal DCT is the identity
        return;
    }
    let b = basis(n);
    let stride = dims.stride(axis);
    let mut line = vec![0.0; n];
    let mut out = vec![0.0; n];
    let [nx, ny, nz] = dims.raw();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let c = [x, y, z];
                if c[axis] != 0 || !active(c) {
                    continue;
                }
                let base = dims.index(c);
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * stride];
                }
                match *dir {
                    Direction::Forward => {
                        for (u, o) in out.iter_mut().enumerate() {
                            let row = &b[u * n..(u + 1) * n];
                            *o = row.iter().zip(&line).map(|(a, v)| a * v).sum();
                        }
                    }
                    Direction::Inverse(limit) => {
                        out.fill(0.0);
                        for (u, &coef) in line.iter().enumerate().take(limit) {
                            if coef == 0.0 {
                                continue;
                            }
                            let row = &b[u * n..(u + 1) * n];
                            for (o, a) in out.iter_mut().zip(row) {
                                *o += a * coef;
                            }
                        }
                    }
                }
                for (k, v) in out.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

/// Forward orthonormal DCT-II of the grid's 0/1 field.
pub fn dct_forward(grid: &BinaryGrid) -> SpectralField {
    let dims = grid.dims();
    let mut data: Vec<f64> = grid.data().iter().map(|&b| f64::from(u8::from(b))).collect();
    for axis in 0..dims.ndim() {
        transform_axis(&mut data, dims, axis, &Direction::Forward, |_| true);
    }
    SpectralField {
        dims,
        coeffs: data,
    }
}

/// Real-valued inverse transform keeping only frequencies with every index
/// below `freqs` (an axis-aligned cube in frequency space).
pub fn lowpass_field(spec: &SpectralField, freqs: usize) -> Result<Vec<f64>> {
    let dims = spec.dims;
    if freqs == 0 || freqs > dims.max_extent() {
        return Err(Error::Parameter(format!(
            "frequency count {freqs} outside 1..={}",
            dims.max_extent()
        )));
    }
    let ndim = dims.ndim();
    let limit: Vec<usize> = (0..3).map(|a| freqs.min(dims.extent(a))).collect();
    let mut data = vec![0.0; dims.len()];
    for (i, v) in data.iter_mut().enumerate() {
        let c = dims.coords(i);
        if (0..ndim).all(|a| c[a] < limit[a]) {
            *v = spec.coeffs[i];
        }
    }
    for axis in 0..ndim {
        // axes before `axis` are already spatial; later ones still truncated
        let limit = &limit;
        transform_axis(
            &mut data,
            dims,
            axis,
            &Direction::Inverse(limit[axis]),
            |c| ((axis + 1)..ndim).all(|a| c[a] < limit[a]),
        );
    }
    Ok(data)
}

/// Full-band inverse transform.
pub fn idct_full(spec: &SpectralField) -> Vec<f64> {
    lowpass_field(spec, spec.dims.max_extent()).expect("full band is always in range")
}

/// Binarized reconstruction from the first `freqs` frequencies per axis.
pub fn lowpass_reconstruct(
    spec: &SpectralField,
    freqs: usize,
    bin_threshold: f64,
) -> Result<BinaryGrid> {
    let field = lowpass_field(spec, freqs)?;
    Ok(binarize(spec.dims, &field, bin_threshold))
}

pub fn binarize(dims: Dims, field: &[f64], threshold: f64) -> BinaryGrid {
    let data = field.iter().map(|&v| v > threshold + BIN_MARGIN).collect();
    BinaryGrid::from_data(dims, data).expect("field matches dims")
}
