//! Cosine-pruned medial axis extraction for 2D images and 3D voxel grids.
//!
//! The pipeline smooths a shape with truncated DCT reconstructions, scores
//! every cell by how often it lands on the medial axis of the smoothed
//! shapes, thresholds that score, and optionally reconnects the surviving
//! pieces with minimum-energy lattice paths. Baseline pruners, noise and
//! rotation models, similarity metrics and a benchmark harness sit alongside.

pub mod bench;
pub mod cpma;
pub mod distfield;
pub mod error;
pub mod grid;
pub mod meshio;
pub mod metrics;
pub mod perturb;
pub mod skeleton;
pub mod synth;
pub mod transform;

pub use error::{Error, Result};
pub use grid::{BinaryGrid, Dims, GridPoint, MedialAxisTransform, ScoreField};
