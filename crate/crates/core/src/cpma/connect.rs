//! Connectivity repair: pieces of the thresholded axis are joined by
//! minimum-energy paths over the foreground lattice, where an edge costs
//! `1 - (F(x) + F(y)) / 2`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::CpmaConfig;
use crate::distfield::edt;
use crate::error::{Error, Result};
use crate::grid::topology::Neighborhood;
use crate::grid::{BinaryGrid, Connectivity, MedialAxisTransform, ScoreField};

/// Foreground lattice graph with 8 (2D) or 26 (3D) connectivity. Edges are
/// implicit; weights are derived from the score field on demand.
pub struct LatticeGraph<'a> {
    grid: &'a BinaryGrid,
    field: &'a ScoreField,
    hood: Neighborhood,
}

impl<'a> LatticeGraph<'a> {
    pub fn nodes(&self) -> Vec<usize> {
        self.grid.foreground_indices()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.grid.get(idx)
    }

    /// Edge energy between two adjacent foreground cells.
    #[inline]
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        1.0 - (self.field.get(a) + self.field.get(b)) / 2.0
    }

    /// Foreground neighbors of `idx` with edge weights, ascending by index.
    pub fn for_each_edge(&self, idx: usize, mut f: impl FnMut(usize, f64)) {
        self.hood.for_each(idx, |j| {
            if self.grid.get(j) {
                f(j, self.weight(idx, j));
            }
        });
    }

    /// Every undirected edge once, as `(a, b, weight)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for a in self.nodes() {
            self.for_each_edge(a, |b, w| {
                if a < b {
                    out.push((a, b, w));
                }
            });
        }
        out
    }
}

pub fn build_lattice<'a>(grid: &'a BinaryGrid, field: &'a ScoreField) -> Result<LatticeGraph<'a>> {
    if grid.dims() != field.dims() {
        return Err(Error::Dimension(format!(
            "score field {} does not match grid {}",
            field.dims(),
            grid.dims()
        )));
    }
    Ok(LatticeGraph {
        grid,
        field,
        hood: Neighborhood::new(grid.dims(), Connectivity::Full),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConnectStatus {
    /// Paths added.
    pub iterations: usize,
    /// The loop stopped at the iteration cap with pieces left unjoined.
    pub cap_reached: bool,
    /// Pieces lie in different foreground components and cannot be joined.
    pub foreground_split: bool,
}

#[derive(Clone, Debug)]
pub struct Connected {
    pub mat: MedialAxisTransform,
    pub status: ConnectStatus,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-energy path from any cell of `sources` to the first settled cell
/// of `targets`, inclusive of both ends.
fn min_energy_path(graph: &LatticeGraph, sources: &[usize], targets: &[usize]) -> Option<Vec<usize>> {
    let n = graph.grid.dims().len();
    let mut is_target = vec![false; n];
    for &t in targets {
        is_target[t] = true;
    }
    let mut cost = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        cost[s] = 0.0;
        heap.push(Reverse(Entry { cost: 0.0, idx: s }));
    }
    while let Some(Reverse(Entry { cost: c, idx })) = heap.pop() {
        if done[idx] {
            continue;
        }
        done[idx] = true;
        if is_target[idx] {
            let mut path = vec![idx];
            let mut cur = idx;
            while prev[cur] != usize::MAX {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        graph.for_each_edge(idx, |j, w| {
            let nc = c + w;
            if !done[j] && nc < cost[j] {
                cost[j] = nc;
                prev[j] = idx;
                heap.push(Reverse(Entry { cost: nc, idx: j }));
            }
        });
    }
    None
}

/// Joins the pieces of `cpma` inside each foreground component, two largest
/// pieces first, until one piece remains or the iteration cap is hit.
/// Added cells take their radius from the grid's distance transform.
pub fn connect_cpma(
    cpma: &MedialAxisTransform,
    field: &ScoreField,
    grid: &BinaryGrid,
    cfg: &CpmaConfig,
) -> Result<Connected> {
    let graph = build_lattice(grid, field)?;
    if cpma.dims() != grid.dims() {
        return Err(Error::Dimension("axis and grid dims differ".into()));
    }
    if let Some(&bad) = cpma.indices().iter().find(|&&i| !grid.get(i)) {
        return Err(Error::Parameter(format!(
            "axis point {:?} lies outside the shape",
            grid.dims().point(bad).coords
        )));
    }
    let (fg_label, _) = grid.label_components(Connectivity::Full);
    let mut set = cpma.to_grid();
    let mut status = ConnectStatus::default();

    loop {
        let mut pieces = set.components(Connectivity::Full);
        // sort into foreground groups, largest piece first within a group
        pieces.sort_by(|a, b| {
            fg_label[a[0]]
                .cmp(&fg_label[b[0]])
                .then(b.len().cmp(&a.len()))
                .then(a[0].cmp(&b[0]))
        });
        status.foreground_split = pieces
            .windows(2)
            .any(|w| fg_label[w[0][0]] != fg_label[w[1][0]]);
        let pair = pieces
            .windows(2)
            .find(|w| fg_label[w[0][0]] == fg_label[w[1][0]]);
        let Some(pair) = pair else {
            break;
        };
        if status.iterations >= cfg.max_connect_iters {
            status.cap_reached = true;
            break;
        }
        let path = min_energy_path(&graph, &pair[0], &pair[1])
            .expect("pieces in one foreground component are joined by a lattice path");
        for i in path {
            set.set(i, true);
        }
        status.iterations += 1;
    }

    let dist = edt(grid);
    let mat = MedialAxisTransform::from_indices(grid.dims(), set.foreground_indices(), |i| {
        cpma.radius_at(i).unwrap_or_else(|| dist.dist(i))
    });
    Ok(Connected { mat, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dims;

    fn uniform(dims: Dims, v: f64) -> ScoreField {
        ScoreField::new(dims, vec![v; dims.len()]).unwrap()
    }

    #[test]
    fn weights_follow_formula() {
        let d = Dims::new2(4, 3);
        let g = BinaryGrid::from_fn(d, |c| c[1] == 1);
        let ones = uniform(d, 1.0);
        assert!(build_lattice(&g, &ones).unwrap().edges().iter().all(|e| e.2 == 0.0));
        let zeros = uniform(d, 0.0);
        let l = build_lattice(&g, &zeros).unwrap();
        assert_eq!(l.edges().len(), 3);
        assert!(l.edges().iter().all(|e| e.2 == 1.0));

        let mut v = vec![0.0; d.len()];
        v[d.index([1, 1, 0])] = 0.8;
        v[d.index([2, 1, 0])] = 0.4;
        let f = ScoreField::new(d, v).unwrap();
        let l = build_lattice(&g, &f).unwrap();
        assert!((l.weight(d.index([1, 1, 0]), d.index([2, 1, 0])) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn corridor_path_is_unique_route() {
        let d = Dims::new2(12, 3);
        let g = BinaryGrid::from_fn(d, |c| c[1] == 1 && (1..11).contains(&c[0]));
        let f = uniform(d, 0.5);
        let dist = edt(&g);
        let ends = [d.index([2, 1, 0]), d.index([9, 1, 0])];
        let cpma = MedialAxisTransform::from_indices(d, ends, |i| dist.dist(i));
        let out = connect_cpma(&cpma, &f, &g, &CpmaConfig::default()).unwrap();
        let xs: Vec<i64> = out.mat.points().iter().map(|p| p.coords[0]).collect();
        assert_eq!(xs, (2..=9).collect::<Vec<_>>());
        assert_eq!(out.status.iterations, 1);
        assert!(!out.status.cap_reached);
    }

    #[test]
    fn connected_input_unchanged() {
        let d = Dims::new2(8, 8);
        let g = BinaryGrid::from_fn(d, |c| (1..7).contains(&c[0]) && (1..7).contains(&c[1]));
        let f = uniform(d, 0.3);
        let cpma = MedialAxisTransform::from_pairs(d, [(d.index([3, 3, 0]), 3.0), (d.index([4, 4, 0]), 3.0)]);
        let out = connect_cpma(&cpma, &f, &g, &CpmaConfig::default()).unwrap();
        assert_eq!(out.mat, cpma);
        assert_eq!(out.status.iterations, 0);
    }

    #[test]
    fn split_foreground_is_reported() {
        let d = Dims::new2(9, 3);
        let g = BinaryGrid::from_fn(d, |c| c[1] == 1 && c[0] != 4 && (1..8).contains(&c[0]));
        let f = uniform(d, 0.5);
        let cpma = MedialAxisTransform::from_pairs(d, [(d.index([1, 1, 0]), 1.0), (d.index([7, 1, 0]), 1.0)]);
        let out = connect_cpma(&cpma, &f, &g, &CpmaConfig::default()).unwrap();
        assert!(out.status.foreground_split);
        assert_eq!(out.mat.len(), 2);
    }

    #[test]
    fn rejects_points_outside_shape() {
        let d = Dims::new2(5, 5);
        let g = BinaryGrid::from_indices(d, [d.index([2, 2, 0])]);
        let cpma = MedialAxisTransform::from_pairs(d, [(0, 1.0)]);
        assert!(connect_cpma(&cpma, &uniform(d, 0.0), &g, &CpmaConfig::default()).is_err());
    }

    #[test]
    fn cap_stops_loop() {
        let d = Dims::new2(20, 3);
        let g = BinaryGrid::from_fn(d, |c| c[1] == 1 && (1..19).contains(&c[0]));
        let f = uniform(d, 0.5);
        let pts: Vec<(usize, f64)> = (1..19).step_by(3).map(|x| (d.index([x, 1, 0]), 1.0)).collect();
        let cpma = MedialAxisTransform::from_pairs(d, pts);
        let cfg = CpmaConfig {
            max_connect_iters: 2,
            ..CpmaConfig::default()
        };
        let out = connect_cpma(&cpma, &f, &g, &cfg).unwrap();
        assert!(out.status.cap_reached);
        assert_eq!(out.status.iterations, 2);
    }
}
