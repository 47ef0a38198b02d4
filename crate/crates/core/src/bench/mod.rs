//! Experiment harness: noise sensitivity, rotation equivariance and the
//! threshold sweep, with deterministic CSV/JSON output.

mod dataset;
mod experiments;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cpma::{connect_cpma, extract_cpma, CpmaConfig};
use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, MedialAxisTransform};
use crate::skeleton::{prune, PrunerSpec};

pub use dataset::{item_seed, load_dataset, load_item, Dataset};
pub use experiments::{run_noise_experiment, run_rotation_experiment, run_tau_sweep};
pub use output::{emit_results, read_results, summarize, write_csv, write_json, OutputFormat, Summary};

/// A skeletonization method under comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MethodSpec {
    Pruner(PrunerSpec),
    /// Raw thresholded score; `None` uses the configured τ.
    Cpma { tau: Option<f64> },
    /// Thresholded score with connectivity enforcement.
    ConnectedCpma { tau: Option<f64> },
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::Pruner(p) => p.name(),
            MethodSpec::Cpma { .. } => "cpma",
            MethodSpec::ConnectedCpma { .. } => "ccpma",
        }
    }

    /// The parameter column for records, e.g. `gamma=5` or `tau=0.47`.
    pub fn params(&self, cfg: &CpmaConfig) -> String {
        match *self {
            MethodSpec::Pruner(p) => match (p, p.param()) {
                (PrunerSpec::Gima { .. }, Some(v)) => format!("gamma={v}"),
                (PrunerSpec::Bema { .. }, Some(v)) => format!("theta={v}"),
                (_, Some(v)) => format!("scale={v}"),
                (_, None) => String::new(),
            },
            MethodSpec::Cpma { tau } | MethodSpec::ConnectedCpma { tau } => {
                format!("tau={}", tau.unwrap_or(cfg.tau))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MethodSpec::Pruner(p) => p.validate(),
            MethodSpec::Cpma { tau: Some(t) } | MethodSpec::ConnectedCpma { tau: Some(t) }
                if !(t > 0.0 && t < 1.0) =>
            {
                Err(Error::Parameter(format!("tau must be in (0, 1), got {t}")))
            }
            _ => Ok(()),
        }
    }

    /// Skeletonizes `grid` with this method.
    pub fn run(&self, grid: &BinaryGrid, cfg: &CpmaConfig) -> Result<MedialAxisTransform> {
        match *self {
            MethodSpec::Pruner(p) => prune(grid, &p),
            MethodSpec::Cpma { tau } => {
                let cfg = CpmaConfig { tau: tau.unwrap_or(cfg.tau), ..*cfg };
                Ok(extract_cpma(grid, &cfg)?.0)
            }
            MethodSpec::ConnectedCpma { tau } => {
                let cfg = CpmaConfig { tau: tau.unwrap_or(cfg.tau), ..*cfg };
                let (raw, field) = extract_cpma(grid, &cfg)?;
                Ok(connect_cpma(&raw, &field, grid, &cfg)?.mat)
            }
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Pruner(p) => p.fmt(f),
            MethodSpec::Cpma { tau: Some(t) } | MethodSpec::ConnectedCpma { tau: Some(t) } => {
                write!(f, "{}:{t}", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    /// Accepts pruner names (`gima:5`) plus `cpma[:tau]` and `ccpma[:tau]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let tau = || -> Result<Option<f64>> {
            param
                .map(|p| p.parse().map_err(|_| Error::Parameter(format!("bad tau in {s:?}"))))
                .transpose()
        };
        let spec = match name.to_ascii_lowercase().as_str() {
            "cpma" => MethodSpec::Cpma { tau: tau()? },
            "ccpma" | "c-cpma" => MethodSpec::ConnectedCpma { tau: tau()? },
            _ => MethodSpec::Pruner(s.parse()?),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Hausdorff,
    DubuissonJain,
    Jaccard,
    /// Number of surviving skeleton points.
    Points,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Hausdorff => "hausdorff",
            Metric::DubuissonJain => "dubuisson_jain",
            Metric::Jaccard => "jaccard",
            Metric::Points => "points",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of benchmark output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub dataset: String,
    pub item: String,
    pub method: String,
    pub params: String,
    pub perturbation: String,
    pub metric: Metric,
    pub value: f64,
    pub seed: u64,
}

impl BenchmarkRecord {
    fn key(&self) -> (&str, &str, &str, &str, &str, Metric, u64) {
        (
            &self.dataset,
            &self.item,
            &self.method,
            &self.params,
            &self.perturbation,
            self.metric,
            self.seed,
        )
    }
}

/// Sorts records by all key columns.
pub fn sort_records(records: &mut [BenchmarkRecord]) {
    records.sort_by(|a, b| a.key().cmp(&b.key()).then(a.value.total_cmp(&b.value)));
}

/// Settings shared by all experiments.
#[derive(Clone, Debug, Default)]
pub struct BenchOptions {
    pub cpma: CpmaConfig,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    /// Rewritten with the records gathered so far after every item.
    pub partial_path: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for s in ["mat", "thinning", "gima:5", "bema:60", "sat:1.2", "sfema:1.1", "cpma", "cpma:0.3", "ccpma"] {
            let m: MethodSpec = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
    }

    #[test]
    fn method_validation() {
        assert!("gima".parse::<MethodSpec>().unwrap_err().to_string().contains("--gamma"));
        assert!(matches!("poisson".parse::<MethodSpec>(), Err(Error::Unimplemented(_))));
        assert!("cpma:1.5".parse::<MethodSpec>().is_err());
    }

    #[test]
    fn params_column() {
        let cfg = CpmaConfig::default();
        assert_eq!(MethodSpec::Cpma { tau: None }.params(&cfg), "tau=0.47");
        assert_eq!("gima:5".parse::<MethodSpec>().unwrap().params(&cfg), "gamma=5");
        assert_eq!(MethodSpec::Pruner(PrunerSpec::Mat).params(&cfg), "");
    }
}
