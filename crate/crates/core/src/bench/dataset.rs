use std::fs;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::grid::{load_grid, BinaryGrid, GridFormat};
use crate::meshio::{parse_ply, voxelize};

/// Shapes loaded from a flat directory, ordered by file stem.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub items: Vec<(String, BinaryGrid)>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, mut items: Vec<(String, BinaryGrid)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Domain("dataset has no loadable items".into()));
        }
        items.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self { name: name.into(), items })
    }
}

/// Loads one shape, dispatching on extension. Meshes are voxelized at
/// `mesh_resolution`.
pub fn load_item(path: &Path, mesh_resolution: usize) -> Result<BinaryGrid> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    if ext == "ply" {
        return voxelize(&parse_ply(path)?, mesh_resolution);
    }
    let fmt = GridFormat::from_path(path)
        .ok_or_else(|| Error::Unsupported(format!("unknown file type: {}", path.display())))?;
    load_grid(path, fmt)
}

/// Loads every `.pbm`, `.vox` and `.ply` file in `dir`. Files that fail to
/// load are logged and skipped; an empty result is an error.
pub fn load_dataset(dir: &Path, mesh_resolution: usize) -> Result<Dataset> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
                    Some("pbm" | "vox" | "ply")
                )
        })
        .collect();
    paths.sort();
    let mut items = Vec::new();
    for path in paths {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        match load_item(&path, mesh_resolution) {
            Ok(g) => items.push((stem, g)),
            Err(e) => warn!("skipping {}: {e}", path.display()),
        }
    }
    let name = dir
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    Dataset::new(name, items)
        .map_err(|_| Error::Domain(format!("no loadable items in {}", dir.display())))
}

/// Per-item seed: the run seed mixed with an FNV-1a hash of the item name, so
/// items get independent noise streams that do not depend on processing order.
pub fn item_seed(seed: u64, item: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in item.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}
