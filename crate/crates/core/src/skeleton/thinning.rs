//! Topological thinning baselines: Zhang-Suen in 2D and a directional
//! simple-point peeling with 26/6 connectivity in 3D.

use crate::grid::{BinaryGrid, Dims};

const N8: [[i64; 2]; 8] = [
    // P2..P9 clockwise from north; y grows downward
    [0, -1],
    [1, -1],
    [1, 0],
    [1, 1],
    [0, 1],
    [-1, 1],
    [-1, 0],
    [-1, -1],
];

fn ring8(g: &BinaryGrid, x: i64, y: i64) -> [bool; 8] {
    let mut p = [false; 8];
    for (k, o) in N8.iter().enumerate() {
        p[k] = g.get_at([x + o[0], y + o[1], 0]);
    }
    p
}

/// Zhang-Suen thinning followed by removal of leftover 2x2 blocks.
/// Marked pixels are deleted only while they remain simple, so shapes never
/// vanish or split.
pub fn thin_2d(grid: &BinaryGrid) -> BinaryGrid {
    let dims = grid.dims();
    let mut g = grid.clone();
    loop {
        let mut changed = false;
        for pass in 0..2 {
            let mut remove = Vec::new();
            for i in g.foreground_indices() {
                let c = dims.coords(i);
                let p = ring8(&g, c[0] as i64, c[1] as i64);
                let b = p.iter().filter(|&&v| v).count();
                if !(2..=6).contains(&b) {
                    continue;
                }
                let a = (0..8).filter(|&k| !p[k] && p[(k + 1) % 8]).count();
                if a != 1 {
                    continue;
                }
                let (p2, p4, p6, p8) = (p[0], p[2], p[4], p[6]);
                let ok = if pass == 0 {
                    !(p2 && p4 && p6) && !(p4 && p6 && p8)
                } else {
                    !(p2 && p4 && p8) && !(p2 && p6 && p8)
                };
                if ok {
                    remove.push(i);
                }
            }
            // parallel deletion erases 2-pixel-thick blocks outright; re-check
            // simplicity against the partially updated grid to keep topology
            for i in remove {
                if is_simple(&g, i) {
                    g.set(i, false);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    remove_square_blocks(&mut g);
    g
}

fn remove_square_blocks(g: &mut BinaryGrid) {
    let dims = g.dims();
    loop {
        let mut removed = false;
        for y in 0..dims.extent(1).saturating_sub(1) {
            for x in 0..dims.extent(0).saturating_sub(1) {
                let cells = [
                    dims.index([x, y, 0]),
                    dims.index([x + 1, y, 0]),
                    dims.index([x, y + 1, 0]),
                    dims.index([x + 1, y + 1, 0]),
                ];
                if !cells.iter().all(|&i| g.get(i)) {
                    continue;
                }
                for &i in &cells {
                    let c = dims.coords(i);
                    let neighbors = ring8(g, c[0] as i64, c[1] as i64)
                        .iter()
                        .filter(|&&v| v)
                        .count();
                    if neighbors >= 2 && is_simple(g, i) {
                        g.set(i, false);
                        removed = true;
                        break;
                    }
                }
            }
        }
        if !removed {
            break;
        }
    }
}

/// Foreground `(3x3x3)` neighborhood of `idx` as a flat array, center excluded
/// from consideration by callers. 2D grids use the middle slice only.
fn cube(g: &BinaryGrid, idx: usize) -> [bool; 27] {
    let p = g.dims().point(idx);
    let mut out = [false; 27];
    let zr = if g.ndim() == 3 { 1 } else { 0 };
    for dz in -zr..=zr {
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                let k = ((dz + 1) * 9 + (dy + 1) * 3 + (dx + 1)) as usize;
                out[k] = g.get_at(p.offset([dx, dy, dz]).coords);
            }
        }
    }
    out
}

fn cube_offset(k: usize) -> [i64; 3] {
    [(k % 3) as i64 - 1, ((k / 3) % 3) as i64 - 1, (k / 9) as i64 - 1]
}

/// Counts components among `members` of the 3x3x3 cube, using adjacency
/// `adjacent`, and only those touching a cell accepted by `anchor`.
fn count_components(
    members: &[bool; 27],
    adjacent: impl Fn([i64; 3], [i64; 3]) -> bool,
    anchor: impl Fn(usize) -> bool,
) -> usize {
    let mut seen = [false; 27];
    let mut count = 0;
    for start in 0..27 {
        if !members[start] || seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut anchored = false;
        while let Some(k) = stack.pop() {
            anchored |= anchor(k);
            for j in 0..27 {
                if members[j] && !seen[j] && adjacent(cube_offset(k), cube_offset(j)) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if anchored {
            count += 1;
        }
    }
    count
}

fn chebyshev(a: [i64; 3], b: [i64; 3]) -> i64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).max().unwrap()
}

fn manhattan(a: [i64; 3], b: [i64; 3]) -> i64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).sum()
}

/// Simple-point test: (8,4) in 2D, (26,6) in 3D.
pub(crate) fn is_simple(g: &BinaryGrid, idx: usize) -> bool {
    let cube = cube(g, idx);
    let three_d = g.ndim() == 3;
    let in_hood = |k: usize| {
        let o = cube_offset(k);
        k != 13 && (three_d || o[2] == 0)
    };
    let mut fg = [false; 27];
    let mut bg = [false; 27];
    for k in 0..27 {
        if !in_hood(k) {
            continue;
        }
        let o = cube_offset(k);
        if cube[k] {
            fg[k] = true;
        } else if manhattan(o, [0, 0, 0]) <= 2 {
            // background is only traced through the 18-neighborhood
            bg[k] = true;
        }
    }
    let fg_count = count_components(&fg, |a, b| chebyshev(a, b) == 1, |_| true);
    let bg_count = count_components(
        &bg,
        |a, b| manhattan(a, b) == 1,
        |k| manhattan(cube_offset(k), [0, 0, 0]) == 1,
    );
    fg_count == 1 && bg_count == 1
}

fn full_neighbors(g: &BinaryGrid, idx: usize) -> usize {
    let c = cube(g, idx);
    (0..27).filter(|&k| k != 13 && c[k]).count()
}

/// Directional peeling of simple, non-end voxels until stable.
pub fn thin_3d(grid: &BinaryGrid) -> BinaryGrid {
    let dims: Dims = grid.dims();
    let mut g = grid.clone();
    let directions: [[i64; 3]; 6] = [
        [0, 0, -1],
        [0, 0, 1],
        [0, -1, 0],
        [0, 1, 0],
        [-1, 0, 0],
        [1, 0, 0],
    ];
    loop {
        let mut changed = false;
        for dir in directions {
            let candidates: Vec<usize> = g
                .foreground_indices()
                .into_iter()
                .filter(|&i| !g.get_at(dims.point(i).offset(dir).coords))
                .collect();
            for i in candidates {
                if !g.get_at(dims.point(i).offset(dir).coords)
                    && full_neighbors(&g, i) > 1
                    && is_simple(&g, i)
                {
                    g.set(i, false);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    g
}

pub fn thin(grid: &BinaryGrid) -> BinaryGrid {
    if grid.ndim() == 3 {
        thin_3d(grid)
    } else {
        thin_2d(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Connectivity;

    /// Textbook Zhang-Suen on nested vectors, kept apart from the grid code.
    fn zhang_suen_oracle(img: &mut [Vec<u8>]) {
        let h = img.len();
        let w = img[0].len();
        loop {
            let mut changed = false;
            for step in 0..2 {
                let mut marks = Vec::new();
                for y in 1..h - 1 {
                    for x in 1..w - 1 {
                        if img[y][x] == 0 {
                            continue;
                        }
                        let p = [
                            img[y - 1][x],
                            img[y - 1][x + 1],
                            img[y][x + 1],
                            img[y + 1][x + 1],
                            img[y + 1][x],
                            img[y + 1][x - 1],
                            img[y][x - 1],
                            img[y - 1][x - 1],
                        ];
                        let b: u8 = p.iter().sum();
                        let a = (0..8).filter(|&k| p[k] == 0 && p[(k + 1) % 8] == 1).count();
                        let c1 = if step == 0 { p[0] * p[2] * p[4] } else { p[0] * p[2] * p[6] };
                        let c2 = if step == 0 { p[2] * p[4] * p[6] } else { p[0] * p[4] * p[6] };
                        if (2..=6).contains(&b) && a == 1 && c1 == 0 && c2 == 0 {
                            marks.push((x, y));
                        }
                    }
                }
                changed |= !marks.is_empty();
                for (x, y) in marks {
                    img[y][x] = 0;
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn to_rows(g: &BinaryGrid) -> Vec<Vec<u8>> {
        let d = g.dims();
        (0..d.extent(1))
            .map(|y| (0..d.extent(0)).map(|x| u8::from(g.get(d.index([x, y, 0])))).collect())
            .collect()
    }

    #[test]
    fn bar_thins_to_spanning_path() {
        let d = Dims::new2(11, 5);
        let g = BinaryGrid::from_fn(d, |c| (1..10).contains(&c[0]) && (1..4).contains(&c[1]));
        let t = thin_2d(&g);
        let mut oracle = to_rows(&g);
        zhang_suen_oracle(&mut oracle);
        assert_eq!(to_rows(&t), oracle);
        assert_eq!(t.components(Connectivity::Full).len(), 1);
        let pts = t.foreground_points();
        assert!(pts.iter().all(|p| p.coords[1] == 2));
        let xs: Vec<i64> = pts.iter().map(|p| p.coords[0]).collect();
        assert_eq!(xs, (2..=7).collect::<Vec<i64>>());
    }

    #[test]
    fn matches_oracle_on_blob() {
        let d = Dims::new2(24, 20);
        let g = BinaryGrid::from_fn(d, |c| {
            let (x, y) = (c[0] as i64 - 11, c[1] as i64 - 9);
            (x * x + 2 * y * y < 70) || (x > 0 && x < 10 && y.abs() < 3)
        });
        let mut oracle = to_rows(&g);
        zhang_suen_oracle(&mut oracle);
        let zs = thin_2d(&g);
        // the cleanup step only removes cells, and only from 2x2 blocks
        let rows = to_rows(&zs);
        for y in 0..rows.len() {
            for x in 0..rows[0].len() {
                assert!(rows[y][x] <= oracle[y][x]);
            }
        }
        assert_eq!(zs.components(Connectivity::Full).len(), 1);
    }

    #[test]
    fn simple_point_cases() {
        let d = Dims::new2(5, 5);
        // center of a horizontal line is not simple
        let line = BinaryGrid::from_fn(d, |c| c[1] == 2 && (1..4).contains(&c[0]));
        assert!(!is_simple(&line, d.index([2, 2, 0])));
        // end of a line is simple
        assert!(is_simple(&line, d.index([3, 2, 0])));
        // isolated point is not simple
        let dot = BinaryGrid::from_indices(d, [d.index([2, 2, 0])]);
        assert!(!is_simple(&dot, d.index([2, 2, 0])));
    }

    #[test]
    fn solid_box_thins_to_connected_curve() {
        let d = Dims::new3(14, 7, 7);
        let g = BinaryGrid::from_fn(d, |c| {
            (1..13).contains(&c[0]) && (1..6).contains(&c[1]) && (1..6).contains(&c[2])
        });
        let t = thin_3d(&g);
        assert!(t.count() > 0);
        assert!(t.count() < 30);
        assert_eq!(t.components(Connectivity::Full).len(), 1);
    }
}
