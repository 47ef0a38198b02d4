//! Boundary noise models and rigid resampling used by the sensitivity
//! experiments.

mod noise;
mod resample;

pub use noise::{apply_noise, trace_contour, NoiseKind, NoiseSpec};
pub use resample::{rotate_grid, rotate_points, rotation_canvas, scale_grid, RotationSpec};
