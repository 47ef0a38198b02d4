use std::collections::VecDeque;

use super::{BinaryGrid, Dims};

/// Lattice adjacency. `Full` is 8-connectivity in 2D and 26 in 3D; `Face`
/// is 4 and 6.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Face,
    Full,
}

impl Connectivity {
    /// Neighbor offsets in ascending linear-index order.
    pub fn offsets(self, ndim: usize) -> Vec<[i64; 3]> {
        let zr: &[i64] = if ndim == 3 { &[-1, 0, 1] } else { &[0] };
        let mut out = Vec::new();
        for &dz in zr {
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let nonzero = [dx, dy, dz].iter().filter(|&&d| d != 0).count();
                    let keep = match self {
                        Connectivity::Face => nonzero == 1,
                        Connectivity::Full => nonzero >= 1,
                    };
                    if keep {
                        out.push([dx, dy, dz]);
                    }
                }
            }
        }
        out
    }
}

/// Precomputed neighbor offsets for a fixed lattice, used by the hot loops.
pub(crate) struct Neighborhood {
    dims: Dims,
    offsets: Vec<[i64; 3]>,
}

impl Neighborhood {
    pub(crate) fn new(dims: Dims, conn: Connectivity) -> Self {
        Self {
            dims,
            offsets: conn.offsets(dims.ndim()),
        }
    }

    /// In-lattice neighbors of `idx`, in ascending linear-index order.
    #[inline]
    pub(crate) fn for_each(&self, idx: usize, mut f: impl FnMut(usize)) {
        let c = self.dims.coords(idx);
        let c = [c[0] as i64, c[1] as i64, c[2] as i64];
        for o in &self.offsets {
            if let Some(j) = self
                .dims
                .checked_index([c[0] + o[0], c[1] + o[1], c[2] + o[2]])
            {
                f(j);
            }
        }
    }
}

impl BinaryGrid {
    /// Connected components of the foreground. Each component is sorted by
    /// linear index and the list is ordered by each component's smallest index.
    pub fn components(&self, conn: Connectivity) -> Vec<Vec<usize>> {
        let nb = Neighborhood::new(self.dims(), conn);
        let mut seen = vec![false; self.dims().len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.dims().len() {
            if !self.get(start) || seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(i) = queue.pop_front() {
                comp.push(i);
                nb.for_each(i, |j| {
                    if self.get(j) && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                });
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Per-cell component label (`usize::MAX` for background) and the count.
    pub fn label_components(&self, conn: Connectivity) -> (Vec<usize>, usize) {
        let comps = self.components(conn);
        let mut labels = vec![usize::MAX; self.dims().len()];
        for (k, comp) in comps.iter().enumerate() {
            for &i in comp {
                labels[i] = k;
            }
        }
        (labels, comps.len())
    }

    /// Keeps only the largest component (ties: the one with the smallest index).
    pub fn largest_component(&self, conn: Connectivity) -> BinaryGrid {
        let comps = self.components(conn);
        let best = comps
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)));
        match best {
            Some((_, comp)) => BinaryGrid::from_indices(self.dims(), comp.iter().copied()),
            None => BinaryGrid::empty(self.dims()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_counts() {
        assert_eq!(Connectivity::Full.offsets(2).len(), 8);
        assert_eq!(Connectivity::Face.offsets(2).len(), 4);
        assert_eq!(Connectivity::Full.offsets(3).len(), 26);
        assert_eq!(Connectivity::Face.offsets(3).len(), 6);
    }

    #[test]
    fn diagonal_pixels_connect_only_in_full() {
        let d = Dims::new2(5, 5);
        let g = BinaryGrid::from_indices(d, [d.index([1, 1, 0]), d.index([2, 2, 0])]);
        assert_eq!(g.components(Connectivity::Full).len(), 1);
        assert_eq!(g.components(Connectivity::Face).len(), 2);
    }

    #[test]
    fn largest_component_kept() {
        let d = Dims::new2(8, 3);
        let g = BinaryGrid::from_fn(d, |c| c[1] == 1 && (c[0] == 1 || (3..7).contains(&c[0])));
        assert_eq!(g.largest_component(Connectivity::Full).count(), 4);
    }
}
