//! Synthetic shapes that make up the committed fixture suite, plus seeded
//! random blobs for property tests.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{write_grid, BinaryGrid, Connectivity, Dims, GridFormat};
use crate::meshio::TriangleMesh;

/// Resolution of the committed 2D suite.
pub const SUITE_2D_SIZE: usize = 128;
/// Resolution of the committed 3D suite.
pub const SUITE_3D_SIZE: usize = 64;

/// Pixel-center test against a polygon by even-odd crossing.
pub fn fill_polygon(dims: Dims, poly: &[[f64; 2]]) -> BinaryGrid {
    BinaryGrid::from_fn(dims, |p| {
        let (x, y) = (p[0] as f64, p[1] as f64);
        let mut inside = false;
        let n = poly.len();
        for i in 0..n {
            let [x0, y0] = poly[i];
            let [x1, y1] = poly[(i + 1) % n];
            if (y0 > y) != (y1 > y) && x < x0 + (y - y0) * (x1 - x0) / (y1 - y0) {
                inside = !inside;
            }
        }
        inside
    })
}

fn scaled(n: usize, v: f64) -> f64 {
    v * n as f64 / 128.0
}

pub fn disc(n: usize) -> BinaryGrid {
    let c = (n as f64 - 1.0) / 2.0;
    let r = scaled(n, 40.0);
    BinaryGrid::from_fn(Dims::new2(n, n), |p| {
        let (x, y) = (p[0] as f64 - c, p[1] as f64 - c);
        x * x + y * y <= r * r
    })
}

pub fn blob(n: usize) -> BinaryGrid {
    let c = (n as f64 - 1.0) / 2.0;
    BinaryGrid::from_fn(Dims::new2(n, n), |p| {
        let (x, y) = (p[0] as f64 - c, p[1] as f64 - c);
        let t = y.atan2(x);
        let r = scaled(n, 36.0 + 9.0 * (3.0 * t + 0.5).sin() + 5.0 * (5.0 * t).cos());
        x * x + y * y <= r * r
    })
}

pub fn rectangle(n: usize) -> BinaryGrid {
    let (x0, x1, y0, y1) = (scaled(n, 24.0), scaled(n, 104.0), scaled(n, 40.0), scaled(n, 88.0));
    BinaryGrid::from_fn(Dims::new2(n, n), |p| {
        let (x, y) = (p[0] as f64, p[1] as f64);
        x >= x0 && x < x1 && y >= y0 && y < y1
    })
}

pub fn l_shape(n: usize) -> BinaryGrid {
    let s = |v| scaled(n, v);
    BinaryGrid::from_fn(Dims::new2(n, n), |p| {
        let (x, y) = (p[0] as f64, p[1] as f64);
        (x >= s(24.0) && x < s(56.0) && y >= s(16.0) && y < s(112.0))
            || (x >= s(24.0) && x < s(108.0) && y >= s(80.0) && y < s(112.0))
    })
}

pub fn star(n: usize) -> BinaryGrid {
    let c = (n as f64 - 1.0) / 2.0;
    let poly: Vec<[f64; 2]> = (0..10)
        .map(|k| {
            let r = scaled(n, if k % 2 == 0 { 54.0 } else { 24.0 });
            let t = -PI / 2.0 + k as f64 * PI / 5.0;
            [c + r * t.cos(), c + r * t.sin()]
        })
        .collect();
    fill_polygon(Dims::new2(n, n), &poly)
}

const HORSE: [[f64; 2]; 28] = [
    [30.0, 50.0], [85.0, 48.0], [95.0, 30.0], [100.0, 18.0], [112.0, 22.0],
    [114.0, 30.0], [104.0, 34.0], [98.0, 55.0], [96.0, 76.0], [92.0, 108.0],
    [85.0, 108.0], [85.0, 80.0], [80.0, 78.0], [77.0, 108.0], [70.0, 108.0],
    [70.0, 80.0], [46.0, 80.0], [45.0, 108.0], [38.0, 108.0], [38.0, 80.0],
    [34.0, 78.0], [33.0, 108.0], [26.0, 108.0], [26.0, 74.0], [24.0, 62.0],
    [14.0, 74.0], [9.0, 69.0], [21.0, 52.0],
];

pub fn horse(n: usize) -> BinaryGrid {
    let poly: Vec<[f64; 2]> = HORSE.iter().map(|&[x, y]| [scaled(n, x), scaled(n, y)]).collect();
    fill_polygon(Dims::new2(n, n), &poly)
}

/// A rectangle with a small square bump on its top edge; the bump is the
/// classic source of a spurious medial branch.
pub fn bump_rectangle(n: usize) -> BinaryGrid {
    let s = |v| scaled(n, v);
    BinaryGrid::from_fn(Dims::new2(n, n), |p| {
        let (x, y) = (p[0] as f64, p[1] as f64);
        let body = x >= s(20.0) && x < s(108.0) && y >= s(44.0) && y < s(84.0);
        let bump = x >= s(62.0) && x < s(65.0) && y >= s(44.0) - 3.0 && y < s(44.0);
        body || bump
    })
}

pub fn box3(n: usize) -> BinaryGrid {
    let f = |v: f64| v * n as f64 / 64.0;
    BinaryGrid::from_fn(Dims::new3(n, n, n), |p| {
        let (x, y, z) = (p[0] as f64, p[1] as f64, p[2] as f64);
        x >= f(10.0) && x < f(54.0) && y >= f(16.0) && y < f(48.0) && z >= f(20.0) && z < f(44.0)
    })
}

pub fn cylinder3(n: usize) -> BinaryGrid {
    let c = (n as f64 - 1.0) / 2.0;
    let r = 16.0 * n as f64 / 64.0;
    let (z0, z1) = (8.0 * n as f64 / 64.0, 56.0 * n as f64 / 64.0);
    BinaryGrid::from_fn(Dims::new3(n, n, n), |p| {
        let (x, y, z) = (p[0] as f64 - c, p[1] as f64 - c, p[2] as f64);
        x * x + y * y <= r * r && z >= z0 && z < z1
    })
}

pub fn blob3(n: usize) -> BinaryGrid {
    let c = (n as f64 - 1.0) / 2.0;
    BinaryGrid::from_fn(Dims::new3(n, n, n), |p| {
        let (x, y, z) = (p[0] as f64 - c, p[1] as f64 - c, p[2] as f64 - c);
        let rho = (x * x + y * y + z * z).sqrt();
        let t = y.atan2(x);
        let ph = if rho == 0.0 { 0.0 } else { (z / rho).acos() };
        let r = (20.0 + 4.0 * (3.0 * t).sin() * ph.sin() + 3.0 * (2.0 * ph).cos()) * n as f64 / 64.0;
        rho <= r
    })
}

/// Named 2D suite at resolution `n`.
pub fn suite_2d(n: usize) -> Vec<(&'static str, BinaryGrid)> {
    vec![
        ("blob", blob(n)),
        ("bump_rectangle", bump_rectangle(n)),
        ("disc", disc(n)),
        ("horse", horse(n)),
        ("l_shape", l_shape(n)),
        ("rectangle", rectangle(n)),
        ("star", star(n)),
    ]
}

/// Named 3D suite at resolution `n`.
pub fn suite_3d(n: usize) -> Vec<(&'static str, BinaryGrid)> {
    vec![("blob", blob3(n)), ("box", box3(n)), ("cylinder", cylinder3(n))]
}

/// Axis-aligned unit cube with outward-facing triangles.
pub fn cube_mesh() -> TriangleMesh {
    let vertices = (0..8)
        .map(|i| [(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64])
        .collect();
    let faces = vec![
        [0, 2, 1], [1, 2, 3], [4, 5, 6], [5, 7, 6],
        [0, 1, 4], [1, 5, 4], [2, 6, 3], [3, 6, 7],
        [0, 4, 2], [2, 4, 6], [1, 3, 5], [3, 7, 5],
    ];
    TriangleMesh { vertices, faces }
}

/// Icosphere of the given radius centered at the origin.
pub fn icosphere(radius: f64, subdivisions: usize) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0], [1.0, t, 0.0], [-1.0, -t, 0.0], [1.0, -t, 0.0],
        [0.0, -1.0, t], [0.0, 1.0, t], [0.0, -1.0, -t], [0.0, 1.0, -t],
        [t, 0.0, -1.0], [t, 0.0, 1.0], [-t, 0.0, -1.0], [-t, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    let norm = |v: [f64; 3]| {
        let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / l, v[1] / l, v[2] / l]
    };
    for v in vertices.iter_mut() {
        *v = norm(*v);
    }
    for _ in 0..subdivisions {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push(norm([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0, (p[2] + q[2]) / 2.0]));
                vertices.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for v in vertices.iter_mut() {
        *v = [v[0] * radius, v[1] * radius, v[2] * radius];
    }
    TriangleMesh { vertices, faces }
}

/// A single 8-connected blob made of overlapping discs on an `n × n` grid.
pub fn random_blob(seed: u64, n: usize) -> BinaryGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = Dims::new2(n, n);
    let nf = n as f64;
    let lim = (nf * 0.25, nf * 0.75);
    let mut discs: Vec<(f64, f64, f64)> = Vec::new();
    let (mut x, mut y) = (nf / 2.0, nf / 2.0);
    let count = rng.random_range(3..=7);
    for _ in 0..count {
        let r = rng.random_range(nf * 0.06..nf * 0.16);
        discs.push((x, y, r));
        let t = rng.random_range(0.0..2.0 * PI);
        let step = r * rng.random_range(0.5..1.1);
        x = (x + step * t.cos()).clamp(lim.0, lim.1);
        y = (y + step * t.sin()).clamp(lim.0, lim.1);
    }
    let g = BinaryGrid::from_fn(dims, |p| {
        let (px, py) = (p[0] as f64, p[1] as f64);
        discs.iter().any(|&(cx, cy, r)| (px - cx).powi(2) + (py - cy).powi(2) <= r * r)
    });
    g.largest_component(Connectivity::Full)
}

/// Every committed fixture file as `(relative path, bytes)`.
pub fn fixture_files() -> Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for (name, g) in suite_2d(SUITE_2D_SIZE) {
        files.push((format!("suite2d/{name}.pbm"), write_grid(&g, GridFormat::Pbm)?));
    }
    for (name, g) in suite_3d(SUITE_3D_SIZE) {
        files.push((format!("suite3d/{name}.vox"), write_grid(&g, GridFormat::Vox)?));
    }
    files.push(("suite3d/cube_mesh.ply".into(), cube_mesh().to_ply().into_bytes()));
    files.push(("mesh/cube.ply".into(), cube_mesh().to_ply().into_bytes()));
    files.push(("mesh/sphere.ply".into(), icosphere(0.5, 4).to_ply().into_bytes()));
    Ok(files)
}

/// Writes the fixture suite under `root`.
pub fn write_fixtures(root: &Path) -> Result<()> {
    for (rel, bytes) in fixture_files()? {
        let path = root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, bytes)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshio::voxelize;

    #[test]
    fn suite_shapes_are_single_padded_components() {
        for (name, g) in suite_2d(128).into_iter().chain(suite_3d(32)) {
            assert!(!g.touches_border(), "{name}");
            assert_eq!(g.components(Connectivity::Full).len(), 1, "{name}");
            assert!(g.count() > 100, "{name}");
        }
    }

    #[test]
    fn bump_is_three_pixels_tall() {
        let g = bump_rectangle(128);
        let top = (0..128).find(|&y| (0..128).any(|x| g.get(g.dims().index([x, y, 0])))).unwrap();
        assert_eq!(top, 41);
    }

    #[test]
    fn icosphere_is_closed() {
        let m = icosphere(0.5, 2);
        assert_eq!(m.faces.len(), 320);
        assert_eq!(m.vertices.len(), 162);
        m.validate().unwrap();
    }

    #[test]
    fn voxelized_sphere_volume() {
        let g = voxelize(&icosphere(0.5, 4), 64).unwrap();
        let scale = 62.0;
        let exact = 4.0 / 3.0 * PI * (0.5f64 * scale).powi(3);
        let rel = (g.count() as f64 - exact).abs() / exact;
        assert!(rel < 0.05, "relative error {rel}");
    }

    #[test]
    fn random_blobs_are_connected_and_seeded() {
        for s in 0..5 {
            let a = random_blob(s, 64);
            assert_eq!(a.components(Connectivity::Full).len(), 1);
            assert!(!a.touches_border());
            assert_eq!(a, random_blob(s, 64));
        }
    }
}
