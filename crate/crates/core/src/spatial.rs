//! Periodic cell list for "is any centre within `r`?" queries on the torus.

use alloc::vec::Vec;

use crate::geometry::wrap_dist;
use crate::math;

/// Centres bucketed into a `g^d` grid of cells of side `1/g ≥ reach`.
#[derive(Debug, Clone)]
pub struct PeriodicIndex {
    dim: usize,
    side: u64,
    reach: f64,
    points: Vec<f64>,
    // (cell id, point index), sorted
    cells: Vec<(u64, u32)>,
}

impl PeriodicIndex {
    /// Indexes the rows of `points` for queries of radius at most `reach`.
    pub fn build(dim: usize, points: Vec<f64>, reach: f64) -> Self {
        assert!(dim >= 1 && points.len() % dim == 0);
        assert!(points.len() / dim <= u32::MAX as usize);
        // cell ids must fit in u64
        let max_side = 1u64 << (60 / dim as u32).min(31);
        let side = if reach > 0.0 {
            (math::floor(1.0 / reach) as u64).clamp(1, max_side)
        } else {
            max_side
        };
        let mut idx = Self {
            dim,
            side,
            reach,
            points,
            cells: Vec::new(),
        };
        if idx.bucketed() {
            let mut cells: Vec<(u64, u32)> = idx
                .points
                .chunks_exact(dim)
                .enumerate()
                .map(|(i, p)| (idx.cell_id(p), i as u32))
                .collect();
            cells.sort_unstable();
            idx.cells = cells;
        }
        idx
    }

    // With fewer than three cells per axis the ±1 neighbourhood wraps onto
    // itself; a linear scan is just as fast there.
    fn bucketed(&self) -> bool {
        self.side >= 3
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn axis_cell(&self, x: f64) -> u64 {
        ((math::floor(x * self.side as f64)) as u64).min(self.side - 1)
    }

    fn cell_id(&self, p: &[f64]) -> u64 {
        p.iter().fold(0, |acc, &x| acc * self.side + self.axis_cell(x))
    }

    /// Smallest distance from `x` to an indexed centre, if it is below `r`.
    /// `r` must not exceed the build reach.
    pub fn nearest_within(&self, x: &[f64], r: f64) -> Option<f64> {
        debug_assert!(r <= self.reach || !self.bucketed());
        let mut best = f64::INFINITY;
        if !self.bucketed() {
            for p in self.points.chunks_exact(self.dim) {
                best = best.min(wrap_dist(p, x));
            }
            return (best < r).then_some(best);
        }
        let home: Vec<u64> = x.iter().map(|&v| self.axis_cell(v)).collect();
        let mut offset = alloc::vec![0i64; self.dim];
        let n = self.side as i64;
        loop {
            let id = home.iter().zip(&offset).fold(0u64, |acc, (&h, &o)| {
                acc * self.side + (h as i64 + o - 1).rem_euclid(n) as u64
            });
            let start = self.cells.partition_point(|&(c, _)| c < id);
            for &(c, i) in &self.cells[start..] {
                if c != id {
                    break;
                }
                let p = &self.points[i as usize * self.dim..(i as usize + 1) * self.dim];
                best = best.min(wrap_dist(p, x));
            }
            // next offset in {0, 1, 2}^d (shifted by -1 above)
            let mut axis = 0;
            loop {
                if axis == self.dim {
                    return (best < r).then_some(best);
                }
                offset[axis] += 1;
                if offset[axis] < 3 {
                    break;
                }
                offset[axis] = 0;
                axis += 1;
            }
        }
    }
}
