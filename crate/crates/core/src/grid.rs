//! Dyadic occupancy grids on the torus.
//!
//! A [`GridCover`] with `bits = m` splits every axis into `2^m` cells; bit
//! `b` of the row-major index `(i_1, …, i_d)` is set iff cell `b` belongs
//! to the represented set. Under [`Membership::CellCenter`] that means the
//! cell centre `((i_k + 0.5) 2^{-m})_k` lies in the set.

use alloc::vec::Vec;

use crate::geometry::{axis_dist, TorusPoint};
use crate::stats;
use crate::{Error, Result};

/// Upper bound on `bits · d` (2^34 cells ≈ 2 GiB of bitset).
pub const MAX_GRID_BITS: u32 = 34;

/// How a ball marks cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Membership {
    /// The cell centre lies in the open ball.
    #[default]
    CellCenter,
    /// The closed cell meets the open ball. Equivalent to centre
    /// membership with the radius widened by half a cell.
    CellTouch,
}

impl Membership {
    /// Radius to test cell centres against.
    pub fn effective_radius(self, r: f64, bits: u32) -> f64 {
        match self {
            Membership::CellCenter => r,
            Membership::CellTouch => r + 0.5 / (1u64 << bits) as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCover {
    dim: usize,
    bits: u32,
    words: Vec<u64>,
}

pub(crate) fn check_shape(dim: usize, bits: u32) -> Result<()> {
    if dim == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    let total = (dim as u64).saturating_mul(bits as u64);
    if total > MAX_GRID_BITS as u64 {
        return Err(Error::Resource(alloc::format!(
            "grid with m·d = {total} exceeds the limit {MAX_GRID_BITS}"
        )));
    }
    Ok(())
}

/// Number of `u64` words backing a grid of the given shape.
pub fn word_count(dim: usize, bits: u32) -> usize {
    let cells = 1u64 << (dim as u32 * bits);
    cells.div_ceil(64) as usize
}

impl GridCover {
    pub fn empty(dim: usize, bits: u32) -> Result<Self> {
        check_shape(dim, bits)?;
        Ok(Self {
            dim,
            bits,
            words: alloc::vec![0; word_count(dim, bits)],
        })
    }

    pub fn full(dim: usize, bits: u32) -> Result<Self> {
        let mut g = Self::empty(dim, bits)?;
        g.words.iter_mut().for_each(|w| *w = !0);
        g.mask_tail();
        Ok(g)
    }

    pub fn from_words(dim: usize, bits: u32, words: Vec<u64>) -> Result<Self> {
        check_shape(dim, bits)?;
        if words.len() != word_count(dim, bits) {
            return Err(Error::invalid("words", "length does not match grid shape"));
        }
        let mut g = Self { dim, bits, words };
        g.mask_tail();
        Ok(g)
    }

    fn mask_tail(&mut self) {
        let cells = self.cell_count();
        if cells < 64 {
            self.words[0] &= (1u64 << cells) - 1;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Resolution `m` in bits per axis.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn side(&self) -> u64 {
        1 << self.bits
    }

    pub fn cell_count(&self) -> u64 {
        1 << (self.bits * self.dim as u32)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn get(&self, idx: u64) -> bool {
        self.words[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }

    pub fn set(&mut self, idx: u64) {
        assert!(idx < self.cell_count());
        self.words[(idx / 64) as usize] |= 1 << (idx % 64);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Fraction of cells set; the grid estimate of the set's Lebesgue mass.
    pub fn fraction(&self) -> f64 {
        self.count_ones() as f64 / self.cell_count() as f64
    }

    pub fn index_of(&self, cell: &[u64]) -> u64 {
        debug_assert_eq!(cell.len(), self.dim);
        cell.iter().fold(0, |acc, &i| (acc << self.bits) | i)
    }

    pub fn coords_of(&self, idx: u64, out: &mut [u64]) {
        let mask = self.side() - 1;
        for (k, slot) in out.iter_mut().enumerate() {
            let shift = (self.dim - 1 - k) as u32 * self.bits;
            *slot = (idx >> shift) & mask;
        }
    }

    /// Centre of cell `idx`.
    pub fn center_of(&self, idx: u64) -> TorusPoint {
        let mut c = alloc::vec![0u64; self.dim];
        self.coords_of(idx, &mut c);
        let h = 1.0 / self.side() as f64;
        TorusPoint::from_raw(c.iter().map(|&i| (i as f64 + 0.5) * h).collect())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.bits != other.bits {
            return Err(Error::invalid("grid", "grids have different shapes"));
        }
        Ok(())
    }

    pub fn intersect_with(&mut self, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a &= b);
        Ok(())
    }

    pub fn union_with(&mut self, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a |= b);
        Ok(())
    }

    pub fn is_subset_of(&self, other: &Self) -> Result<bool> {
        self.check_same_shape(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0))
    }

    /// Indices of set cells in increasing order.
    pub fn ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            word: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Marks every cell selected by the ball `B(center, r)`.
    pub fn paint_ball(&mut self, center: &[f64], r: f64, membership: Membership) {
        paint_balls_window(center, self.dim, r, membership, self.bits, 0, &mut self.words);
    }

    /// Marks the union of balls of a common radius around the rows of
    /// the flat `centers` buffer.
    pub fn paint_balls(&mut self, centers: &[f64], r: f64, membership: Membership) {
        paint_balls_window(centers, self.dim, r, membership, self.bits, 0, &mut self.words);
    }

    /// The same set seen at resolution `bits - 1`: a coarse cell is set iff
    /// one of its `2^d` children is.
    pub fn coarsened(&self) -> GridCover {
        assert!(self.bits > 0, "cannot coarsen a single-cell grid");
        let mut out = GridCover {
            dim: self.dim,
            bits: self.bits - 1,
            words: alloc::vec![0; word_count(self.dim, self.bits - 1)],
        };
        if self.dim == 1 {
            coarsen_line(&self.words, &mut out.words, self.bits);
            return out;
        }
        let mask = self.side() - 1;
        let (fine, coarse) = (self.bits, self.bits - 1);
        for idx in self.ones() {
            let mut c = 0u64;
            for k in 0..self.dim as u32 {
                let shift = (self.dim as u32 - 1 - k) * fine;
                c = (c << coarse) | (((idx >> shift) & mask) >> 1);
            }
            out.words[(c / 64) as usize] |= 1 << (c % 64);
        }
        out
    }

    /// Number of coarse cells of side `2^{-m_coarse}` containing a set cell.
    pub fn box_count(&self, m_coarse: u32) -> Result<u64> {
        Ok(*self
            .box_counts(m_coarse, m_coarse)?
            .first()
            .expect("one level requested"))
    }

    /// Box counts for every resolution in `m_lo..=m_hi`, lowest first.
    pub fn box_counts(&self, m_lo: u32, m_hi: u32) -> Result<Vec<u64>> {
        if m_lo > m_hi || m_hi > self.bits {
            return Err(Error::invalid(
                "m_coarse",
                alloc::format!("need m_lo <= m_hi <= {}", self.bits),
            ));
        }
        let mut counts = alloc::vec![0u64; (m_hi - m_lo + 1) as usize];
        let mut level = None::<GridCover>;
        for m in (m_lo..=self.bits).rev() {
            let g = level.as_ref().unwrap_or(self);
            if m <= m_hi {
                counts[(m - m_lo) as usize] = g.count_ones();
            }
            if m > m_lo {
                level = Some(g.coarsened());
            }
        }
        Ok(counts)
    }
}

// Pairs adjacent bits and packs the results: the d = 1 coarsening.
fn coarsen_line(fine: &[u64], coarse: &mut [u64], fine_bits: u32) {
    fn pack_even(mut x: u64) -> u64 {
        x &= 0x5555_5555_5555_5555;
        x = (x | (x >> 1)) & 0x3333_3333_3333_3333;
        x = (x | (x >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
        x = (x | (x >> 4)) & 0x00ff_00ff_00ff_00ff;
        x = (x | (x >> 8)) & 0x0000_ffff_0000_ffff;
        (x | (x >> 16)) & 0x0000_0000_ffff_ffff
    }
    if fine_bits <= 6 {
        // everything fits in one word
        let w = fine[0];
        coarse[0] = pack_even(w | (w >> 1));
        return;
    }
    for (i, out) in coarse.iter_mut().enumerate() {
        let lo = fine[2 * i];
        let hi = fine[2 * i + 1];
        *out = pack_even(lo | (lo >> 1)) | (pack_even(hi | (hi >> 1)) << 32);
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    word: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.current != 0 {
                let t = self.current.trailing_zeros() as u64;
                self.current &= self.current - 1;
                return Some(self.word as u64 * 64 + t);
            }
            self.word += 1;
            self.current = *self.words.get(self.word)?;
        }
    }
}

/// Least-squares slope of `log2 box_count(m')` against `m'` over
/// `m' ∈ [m_lo, m_hi]`, clipped to `[0, d]`.
///
/// An empty grid yields [`Error::EmptySet`]: the dimension of the empty set
/// is undefined, which is a different answer from 0.
pub fn estimate_box_dim(grid: &GridCover, m_lo: u32, m_hi: u32) -> Result<f64> {
    if m_lo >= m_hi || m_hi > grid.bits() {
        return Err(Error::invalid(
            "m_lo/m_hi",
            alloc::format!("need m_lo < m_hi <= {}", grid.bits()),
        ));
    }
    if grid.is_empty() {
        return Err(Error::EmptySet);
    }
    let counts = grid.box_counts(m_lo, m_hi)?;
    let xs: Vec<f64> = (m_lo..=m_hi).map(|m| m as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| crate::math::log2(c as f64)).collect();
    let slope = stats::ls_slope(&xs, &ys).expect("at least two levels");
    Ok(slope.clamp(0.0, grid.dim() as f64))
}

/// Half-open index ranges on one axis (at most two, from the wrap).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct AxisRuns {
    len: usize,
    runs: [(u64, u64); 2],
}

impl AxisRuns {
    const EMPTY: Self = Self {
        len: 0,
        runs: [(0, 0); 2],
    };

    fn push(&mut self, a: u64, b: u64) {
        if a >= b {
            return;
        }
        if self.len > 0 && self.runs[self.len - 1].1 == a {
            self.runs[self.len - 1].1 = b;
            return;
        }
        assert!(self.len < 2, "open arc produced more than two runs");
        self.runs[self.len] = (a, b);
        self.len += 1;
    }

    pub(crate) fn as_slice(&self) -> &[(u64, u64)] {
        &self.runs[..self.len]
    }
}

#[inline]
fn center(i: u64, side: u64) -> f64 {
    (i as f64 + 0.5) / side as f64
}

/// Cells `i` on one axis with `axis_dist(center(i), x) < r`.
pub(crate) fn axis_runs(x: f64, r: f64, side: u64) -> AxisRuns {
    let mut out = AxisRuns::EMPTY;
    if !(r > 0.0) {
        return out;
    }
    if r > 0.5 {
        out.push(0, side);
        return out;
    }
    let s = side as f64;
    let n = side as i64;
    let inside = |i: i64| axis_dist(center(i.rem_euclid(n) as u64, side), x) < r;
    let mut lo = crate::math::ceil((x - r) * s - 0.5) as i64;
    let mut hi = crate::math::floor((x + r) * s - 0.5) as i64;
    if hi - lo + 1 >= n - 2 {
        // ball covers (nearly) the whole axis: decide every cell exactly
        let mut start = None;
        for i in 0..n {
            match (inside(i), start) {
                (true, None) => start = Some(i as u64),
                (false, Some(a)) => {
                    out.push(a, i as u64);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(a) = start {
            out.push(a, side);
        }
        return out;
    }
    while lo <= hi && !inside(lo) {
        lo += 1;
    }
    if lo > hi {
        // the rounding window missed; the true set is at most the two
        // neighbours of the window
        lo = hi + 1;
        for i in [hi, hi + 1] {
            if inside(i) {
                lo = lo.min(i);
                hi = i;
            }
        }
        if lo > hi {
            return out;
        }
    }
    while hi - lo + 1 < n && inside(lo - 1) {
        lo -= 1;
    }
    while hi >= lo && !inside(hi) {
        hi -= 1;
    }
    while hi - lo + 1 < n && inside(hi + 1) {
        hi += 1;
    }
    let a = lo.rem_euclid(n) as u64;
    let len = (hi - lo + 1) as u64;
    if a + len <= side {
        out.push(a, a + len);
    } else {
        out.push(0, a + len - side);
        out.push(a, side);
    }
    out
}

#[inline]
fn set_bit_range(words: &mut [u64], a: u64, b: u64) {
    if a >= b {
        return;
    }
    let (wa, wb) = ((a / 64) as usize, (b / 64) as usize);
    let (ba, bb) = (a % 64, b % 64);
    if wa == wb {
        words[wa] |= ((1u64 << (bb - ba)) - 1) << ba;
        return;
    }
    words[wa] |= !0u64 << ba;
    for w in &mut words[wa + 1..wb] {
        *w = !0;
    }
    if bb > 0 {
        words[wb] |= (1u64 << bb) - 1;
    }
}

/// Paints the union of balls `B(c, r)` (rows `c` of `centers`) into a window
/// of a grid's words: `words` holds words `word_offset..word_offset +
/// words.len()` of the full bitset and only bits inside it are touched.
///
/// Disjoint windows can be painted independently, so the final bitset does
/// not depend on how the words are split between workers.
pub fn paint_balls_window(
    centers: &[f64],
    dim: usize,
    radius: f64,
    membership: Membership,
    bits: u32,
    word_offset: usize,
    words: &mut [u64],
) {
    assert!(dim >= 1 && centers.len() % dim == 0);
    let side = 1u64 << bits;
    let r = membership.effective_radius(radius, bits);
    let cells = 1u64 << (bits * dim as u32);
    let lo = (word_offset as u64 * 64).min(cells);
    let hi = ((word_offset + words.len()) as u64 * 64).min(cells);
    if lo >= hi {
        return;
    }
    let mut strides = alloc::vec![1u64; dim];
    for k in (0..dim.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * side;
    }
    let mut runs = alloc::vec![AxisRuns::EMPTY; dim];
    let mut painter = Painter {
        runs: &mut runs,
        strides: &strides,
        lo,
        hi,
        base_bit: word_offset as u64 * 64,
        words,
    };
    for c in centers.chunks_exact(dim) {
        let mut any_empty = false;
        for (slot, &x) in painter.runs.iter_mut().zip(c) {
            *slot = axis_runs(x, r, side);
            any_empty |= slot.len == 0;
        }
        if !any_empty {
            painter.emit(0, 0);
        }
    }
}

struct Painter<'a> {
    runs: &'a mut [AxisRuns],
    strides: &'a [u64],
    lo: u64,
    hi: u64,
    base_bit: u64,
    words: &'a mut [u64],
}

impl Painter<'_> {
    fn emit(&mut self, axis: usize, base: u64) {
        let stride = self.strides[axis];
        let last = axis + 1 == self.runs.len();
        let runs = self.runs[axis];
        for &(a, b) in runs.as_slice() {
            // clip the run to indices whose span meets the window
            let a = a.max(self.lo.saturating_sub(base) / stride);
            let b = b.min((self.hi.saturating_sub(base)).div_ceil(stride));
            if a >= b {
                continue;
            }
            if last {
                let s = (base + a).max(self.lo) - self.base_bit;
                let e = (base + b).min(self.hi) - self.base_bit;
                set_bit_range(self.words, s, e);
            } else {
                for i in a..b {
                    self.emit(axis + 1, base + i * stride);
                }
            }
        }
    }
}
