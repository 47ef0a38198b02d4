//! Un-pruned discrete medial axis and the baseline pruning methods.

mod mat;
mod pruners;
mod thinning;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distfield::edt;
use crate::error::{Error, Result};
use crate::grid::topology::Neighborhood;
use crate::grid::{BinaryGrid, Connectivity, GridPoint, MedialAxisTransform};

pub use mat::{extract_mat, extract_mat_with, reconstruct};
pub use pruners::{bema, gima, sat, sfema};
pub use thinning::{thin, thin_2d, thin_3d};

/// A skeletonization baseline and its parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum PrunerSpec {
    /// Un-pruned medial axis.
    Mat,
    /// Zhang-Suen thinning (directional simple-point peeling in 3D).
    Thinning,
    /// Keeps axis points whose neighbors project at least `gamma` pixels apart.
    Gima { gamma: f64 },
    /// Keeps axis points whose projection bisector angle is at least `theta` degrees.
    Bema { theta: f64 },
    /// Scale axis with ball scale factor `scale`.
    Sat { scale: f64 },
    /// Scale-filtered medial axis with ball scale factor `scale`.
    Sfema { scale: f64 },
    /// Declared for result joins only; not implemented.
    PoissonSkel,
    /// Declared for result joins only; not implemented.
    Teasar,
}

impl PrunerSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PrunerSpec::Gima { gamma } if !(gamma >= 0.0) => {
                Err(Error::Parameter(format!("gamma must be >= 0, got {gamma}")))
            }
            PrunerSpec::Bema { theta } if !(0.0..=180.0).contains(&theta) => Err(
                Error::Parameter(format!("theta must be within [0, 180], got {theta}")),
            ),
            PrunerSpec::Sat { scale } | PrunerSpec::Sfema { scale } if !(scale >= 1.0) => {
                Err(Error::Parameter(format!("scale must be >= 1, got {scale}")))
            }
            PrunerSpec::PoissonSkel => Err(Error::Unimplemented("poisson".into())),
            PrunerSpec::Teasar => Err(Error::Unimplemented("teasar".into())),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PrunerSpec::Mat => "mat",
            PrunerSpec::Thinning => "thinning",
            PrunerSpec::Gima { .. } => "gima",
            PrunerSpec::Bema { .. } => "bema",
            PrunerSpec::Sat { .. } => "sat",
            PrunerSpec::Sfema { .. } => "sfema",
            PrunerSpec::PoissonSkel => "poisson",
            PrunerSpec::Teasar => "teasar",
        }
    }

    pub fn param(&self) -> Option<f64> {
        match *self {
            PrunerSpec::Gima { gamma } => Some(gamma),
            PrunerSpec::Bema { theta } => Some(theta),
            PrunerSpec::Sat { scale } | PrunerSpec::Sfema { scale } => Some(scale),
            _ => None,
        }
    }

    /// Builds a spec from a method name and its (optional) parameter.
    pub fn from_parts(name: &str, param: Option<f64>) -> Result<Self> {
        let need = |what: &str| {
            param.ok_or_else(|| Error::Parameter(format!("method {name} requires --{what}")))
        };
        let spec = match name.to_ascii_lowercase().as_str() {
            "mat" => PrunerSpec::Mat,
            "thinning" => PrunerSpec::Thinning,
            "gima" => PrunerSpec::Gima {
                gamma: need("gamma")?,
            },
            "bema" => PrunerSpec::Bema {
                theta: need("theta")?,
            },
            "sat" => PrunerSpec::Sat {
                scale: need("scale")?,
            },
            "sfema" => PrunerSpec::Sfema {
                scale: need("scale")?,
            },
            "poisson" | "poissonskel" => PrunerSpec::PoissonSkel,
            "teasar" => PrunerSpec::Teasar,
            other => return Err(Error::Parameter(format!("unknown method {other:?}"))),
        };
        Ok(spec)
    }
}

impl fmt::Display for PrunerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.param() {
            Some(p) => write!(f, "{}:{p}", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

impl FromStr for PrunerSpec {
    type Err = Error;

    /// Parses `name` or `name:param`, e.g. `gima:5`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((name, p)) => {
                let v: f64 = p
                    .parse()
                    .map_err(|_| Error::Parameter(format!("bad parameter in {s:?}")))?;
                PrunerSpec::from_parts(name, Some(v))
            }
            None => PrunerSpec::from_parts(s, None),
        }
    }
}

/// Runs a baseline skeletonization. Radii of the output come from the
/// distance transform of `grid`.
pub fn prune(grid: &BinaryGrid, spec: &PrunerSpec) -> Result<MedialAxisTransform> {
    spec.validate()?;
    if grid.is_blank() {
        return Ok(MedialAxisTransform::empty(grid.dims()));
    }
    let out = match *spec {
        PrunerSpec::Mat => extract_mat(grid),
        PrunerSpec::Thinning => {
            let field = edt(grid);
            let thin = thin(grid);
            MedialAxisTransform::from_indices(grid.dims(), thin.foreground_indices(), |i| {
                field.dist(i)
            })
        }
        PrunerSpec::Gima { gamma } => gima(grid, gamma),
        PrunerSpec::Bema { theta } => bema(grid, theta),
        PrunerSpec::Sat { scale } => sat(grid, scale),
        PrunerSpec::Sfema { scale } => sfema(grid, scale),
        PrunerSpec::PoissonSkel | PrunerSpec::Teasar => unreachable!("rejected by validate"),
    };
    Ok(out)
}

/// Skeleton points with exactly one 8-neighbor (26 in 3D) in the skeleton.
pub fn endpoints(mat: &MedialAxisTransform) -> Vec<GridPoint> {
    let grid = mat.to_grid();
    let hood = Neighborhood::new(grid.dims(), Connectivity::Full);
    mat.indices()
        .iter()
        .filter(|&&i| {
            let mut n = 0;
            hood.for_each(i, |j| n += grid.get(j) as usize);
            n == 1
        })
        .map(|&i| grid.dims().point(i))
        .collect()
}
