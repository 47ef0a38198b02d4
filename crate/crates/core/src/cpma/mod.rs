//! Cosine-pruned medial axis: DCT-smoothed medial axis scores, thresholding
//! and connectivity repair.

mod connect;
mod score;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Dims;

pub use connect::{build_lattice, connect_cpma, ConnectStatus, Connected, LatticeGraph};
pub use score::{extract_cpma, score_function, threshold_score};

/// Default score threshold.
pub const DEFAULT_TAU: f64 = 0.47;

/// Iteration cap for the connection loop.
pub const DEFAULT_MAX_CONNECT_ITERS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpmaConfig {
    /// Cells scoring strictly above `tau` survive.
    pub tau: f64,
    /// Number of low-pass reconstructions aggregated; `None` uses half the
    /// largest grid extent, rounded up.
    pub max_freq: Option<usize>,
    /// Binarization threshold applied to each reconstruction.
    pub bin_threshold: f64,
    pub max_connect_iters: usize,
}

impl Default for CpmaConfig {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            max_freq: None,
            bin_threshold: crate::transform::DEFAULT_BIN_THRESHOLD,
            max_connect_iters: DEFAULT_MAX_CONNECT_ITERS,
        }
    }
}

impl CpmaConfig {
    pub fn with_tau(tau: f64) -> Self {
        Self {
            tau,
            ..Self::default()
        }
    }

    /// Frequency count actually used on a grid of the given extent.
    pub fn resolved_max_freq(&self, dims: Dims) -> usize {
        self.max_freq
            .unwrap_or_else(|| dims.max_extent().div_ceil(2))
            .max(1)
    }

    pub fn validate(&self, dims: Dims) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::Parameter(format!("tau must be in (0, 1), got {}", self.tau)));
        }
        if let Some(m) = self.max_freq {
            if m == 0 || m > dims.max_extent() {
                return Err(Error::Parameter(format!(
                    "max_freq must be in 1..={}, got {m}",
                    dims.max_extent()
                )));
            }
        }
        if self.max_connect_iters == 0 {
            return Err(Error::Parameter("max_connect_iters must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = CpmaConfig::default();
        assert_eq!(c.tau, 0.47);
        assert_eq!(c.max_connect_iters, 200);
        assert_eq!(c.resolved_max_freq(Dims::new2(128, 100)), 64);
        assert_eq!(c.resolved_max_freq(Dims::new3(31, 9, 9)), 16);
    }

    #[test]
    fn validation() {
        let d = Dims::new2(16, 16);
        assert!(CpmaConfig::with_tau(0.0).validate(d).is_err());
        assert!(CpmaConfig::with_tau(1.0).validate(d).is_err());
        let mut c = CpmaConfig::default();
        c.max_freq = Some(17);
        assert!(c.validate(d).is_err());
        c.max_freq = Some(16);
        assert!(c.validate(d).is_ok());
        c.max_connect_iters = 0;
        assert!(c.validate(d).is_err());
    }
}
