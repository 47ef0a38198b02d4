use rayon::prelude::*;

use super::CpmaConfig;
use crate::distfield::edt;
use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, MedialAxisTransform, ScoreField};
use crate::skeleton::extract_mat;
use crate::transform::{dct_forward, lowpass_reconstruct};

/// Fraction of the low-pass reconstructions `1..=max_freq` whose medial axis
/// contains each cell.
///
/// Per-frequency axes are computed in parallel; counts are integers, so the
/// result does not depend on scheduling.
pub fn score_function(grid: &BinaryGrid, cfg: &CpmaConfig) -> Result<ScoreField> {
    let dims = grid.dims();
    cfg.validate(dims)?;
    if grid.is_blank() {
        return Ok(ScoreField::zeros(dims));
    }
    let spectrum = dct_forward(grid);
    let n = cfg.resolved_max_freq(dims);
    let counts = (1..=n)
        .into_par_iter()
        .map(|i| {
            let smooth = lowpass_reconstruct(&spectrum, i, cfg.bin_threshold)?;
            let mut counts = vec![0u32; dims.len()];
            for &j in extract_mat(&smooth).indices() {
                counts[j] += 1;
            }
            Ok(counts)
        })
        .try_reduce(
            || vec![0u32; dims.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok::<_, Error>(a)
            },
        )?;
    let values = counts.into_iter().map(|c| c as f64 / n as f64).collect();
    ScoreField::new(dims, values)
}

/// Foreground cells whose score exceeds `tau`, with radii from the grid's
/// distance transform.
pub fn threshold_score(grid: &BinaryGrid, field: &ScoreField, tau: f64) -> Result<MedialAxisTransform> {
    if field.dims() != grid.dims() {
        return Err(Error::Dimension(format!(
            "score field {} does not match grid {}",
            field.dims(),
            grid.dims()
        )));
    }
    let dist = edt(grid);
    let keep = grid
        .foreground_indices()
        .into_iter()
        .filter(|&i| field.get(i) > tau);
    Ok(MedialAxisTransform::from_indices(grid.dims(), keep, |i| dist.dist(i)))
}

/// Thresholded score: the cosine-pruned medial axis and the score field it
/// came from.
pub fn extract_cpma(
    grid: &BinaryGrid,
    cfg: &CpmaConfig,
) -> Result<(MedialAxisTransform, ScoreField)> {
    let field = score_function(grid, cfg)?;
    let mat = threshold_score(grid, &field, cfg.tau)?;
    Ok((mat, field))
}
