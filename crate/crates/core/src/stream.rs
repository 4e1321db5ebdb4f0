//! Counter-based sample streams.
//!
//! `ω_n` is a pure function of `(seed, n)`: coordinate `i` of `ω_n` is the
//! SplitMix64 output at counter `(n - 1) · d + i` under a key derived from
//! the seed. Any index can be drawn in O(1) without generating its
//! predecessors, so streams can be shared across threads and re-derived per
//! probe or per grid slab.

use alloc::vec::Vec;

use crate::geometry::TorusPoint;
use crate::measure::MeasureModel;
use crate::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Largest index a seeded stream will hand out.
pub const STREAM_CAPACITY: u64 = 1 << 56;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `base`; independent of how many trials exist.
pub fn substream(base: u64, index: u64) -> u64 {
    mix64(base ^ mix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

#[inline]
fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Random-access source of points `ω_1, ω_2, …` on the torus.
pub trait PointSource {
    /// Ambient dimension of every point.
    fn dim(&self) -> usize;

    /// Number of addressable indices; `n` ranges over `1..=capacity`.
    fn capacity(&self) -> u64;

    /// Writes `ω_n` into `out` (length `dim()`). Panics if `n` is 0 or
    /// beyond capacity.
    fn fill(&self, n: u64, out: &mut [f64]);

    fn sample(&self, n: u64) -> TorusPoint {
        let mut v = alloc::vec![0.0; self.dim()];
        self.fill(n, &mut v);
        TorusPoint::from_raw(v)
    }

    /// `ω_1..=ω_count` as a flat row-major buffer.
    fn take_flat(&self, count: u64) -> Result<Vec<f64>> {
        if count > self.capacity() {
            return Err(Error::Resource(alloc::format!(
                "requested {count} samples, stream capacity is {}",
                self.capacity()
            )));
        }
        let d = self.dim();
        let mut buf = alloc::vec![0.0; count as usize * d];
        for (i, chunk) in buf.chunks_exact_mut(d).enumerate() {
            self.fill(i as u64 + 1, chunk);
        }
        Ok(buf)
    }
}

/// Deterministic i.i.d. stream under a measure model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleStream {
    seed: u64,
    key: u64,
    measure: MeasureModel,
}

impl SampleStream {
    pub fn new(seed: u64, measure: MeasureModel) -> Result<Self> {
        measure.validate()?;
        Ok(Self {
            seed,
            key: mix64(seed ^ 0x5851_f42d_4c95_7f2d),
            measure,
        })
    }

    pub fn uniform(seed: u64, d: usize) -> Result<Self> {
        Self::new(seed, MeasureModel::uniform(d)?)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn measure(&self) -> MeasureModel {
        self.measure
    }

    /// Raw 64-bit word at a counter position.
    #[inline]
    pub fn word(&self, counter: u64) -> u64 {
        mix64(
            self.key
                .wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Uniform `[0, 1)` variate at a counter position.
    #[inline]
    pub fn uniform_at(&self, counter: u64) -> f64 {
        unit_f64(self.word(counter))
    }
}

impl PointSource for SampleStream {
    fn dim(&self) -> usize {
        self.measure.dim()
    }

    fn capacity(&self) -> u64 {
        STREAM_CAPACITY
    }

    #[inline]
    fn fill(&self, n: u64, out: &mut [f64]) {
        assert!((1..=STREAM_CAPACITY).contains(&n), "sample index {n} out of range");
        let d = self.measure.dim();
        let k = self.measure.support_dim();
        let base = (n - 1) * d as u64;
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = if i < k { self.uniform_at(base + i as u64) } else { 0.0 };
        }
    }
}

/// A fixed, finite list of points; used to force configurations in tests
/// and to replay recorded streams.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitStream {
    d: usize,
    flat: Vec<f64>,
}

impl ExplicitStream {
    pub fn new(points: Vec<TorusPoint>) -> Result<Self> {
        let d = points
            .first()
            .map(TorusPoint::dim)
            .ok_or_else(|| Error::invalid("points", "explicit stream is empty"))?;
        let mut flat = Vec::with_capacity(points.len() * d);
        for p in points {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: p.dim(),
                });
            }
            flat.extend_from_slice(p.coords());
        }
        Ok(Self { d, flat })
    }

    /// Builds a one-dimensional stream from scalar coordinates.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        let pts = values
            .iter()
            .map(|&v| TorusPoint::new(alloc::vec![v]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts)
    }
}

impl PointSource for ExplicitStream {
    fn dim(&self) -> usize {
        self.d
    }

    fn capacity(&self) -> u64 {
        (self.flat.len() / self.d) as u64
    }

    fn fill(&self, n: u64, out: &mut [f64]) {
        assert!(n >= 1 && n <= self.capacity(), "sample index {n} out of range");
        let start = (n as usize - 1) * self.d;
        out.copy_from_slice(&self.flat[start..start + self.d]);
    }
}

impl<S: PointSource + ?Sized> PointSource for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn capacity(&self) -> u64 {
        (**self).capacity()
    }
    fn fill(&self, n: u64, out: &mut [f64]) {
        (**self).fill(n, out)
    }
}
