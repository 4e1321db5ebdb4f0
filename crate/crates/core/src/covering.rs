//! Finite-resolution approximations of `U(ω, ℓ)` and of the liminf witness
//! set, plus cross-seed probes.
//!
//! The covering set is `⋃_p ⋂_{N ≥ p} ⋃_{n ≤ N} B(ω_n, ℓ_N)`. A grid built
//! here is a single tail term: it keeps one `p` and intersects over a finite
//! ladder of checkpoints `N`, so it over-approximates the `p`-th term and
//! under-approximates the union over `p`.

use alloc::vec::Vec;

use crate::grid::{self, estimate_box_dim, GridCover, Membership};
use crate::growth;
use crate::measure::MeasureModel;
use crate::schedule::{critical_radius, RadiusSchedule};
use crate::stats::Spread;
use crate::stream::{PointSource, SampleStream};
use crate::{Error, Result};

/// Attached to every covered-fraction or dimension output.
pub const TRUNCATION_CAVEAT: &str = "finite window: one tail index p and \
checkpoints up to N_max stand in for the union over p and the intersection \
over all N >= p; the truncation bias is not quantified";

/// `p`, then every power of two in `(p, n_max]`, then `n_max` itself.
pub fn dyadic_ladder(p: u64, n_max: u64) -> Result<Vec<u64>> {
    if p == 0 || n_max < p {
        return Err(Error::invalid("p/n_max", "need 1 <= p <= n_max"));
    }
    let mut out = alloc::vec![p];
    let mut next = p.checked_next_power_of_two().unwrap_or(u64::MAX);
    if next == p {
        next = next.saturating_mul(2);
    }
    while next <= n_max {
        out.push(next);
        match next.checked_mul(2) {
            Some(v) => next = v,
            None => break,
        }
    }
    if *out.last().expect("nonempty") != n_max {
        out.push(n_max);
    }
    Ok(out)
}

fn check_checkpoints(p: u64, checkpoints: &[u64], capacity: u64) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(Error::invalid("checkpoints", "must be nonempty"));
    }
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("checkpoints", "must be strictly increasing"));
    }
    if checkpoints[0] < p.max(1) {
        return Err(Error::invalid("checkpoints", "every checkpoint must be >= p"));
    }
    let last = *checkpoints.last().expect("nonempty");
    if last > capacity {
        return Err(Error::OutOfRange {
            index: last,
            len: capacity,
        });
    }
    Ok(())
}

/// Cells whose centre lies in `⋂_{N ∈ checkpoints} ⋃_{n ≤ N} B(ω_n, ℓ_N)`.
pub fn build_cover_grid<S: PointSource>(
    stream: &S,
    schedule: &RadiusSchedule,
    p: u64,
    checkpoints: &[u64],
    m: u32,
) -> Result<GridCover> {
    build_cover_grid_with(stream, schedule, p, checkpoints, m, Membership::CellCenter)
}

pub fn build_cover_grid_with<S: PointSource>(
    stream: &S,
    schedule: &RadiusSchedule,
    p: u64,
    checkpoints: &[u64],
    m: u32,
    membership: Membership,
) -> Result<GridCover> {
    build_cover_grid_using(stream, schedule, p, checkpoints, m, |centers, r, union| {
        union.paint_balls(centers, r, membership);
    })
}

/// [`build_cover_grid_with`] with a caller-supplied painter: `paint(centers,
/// r, union)` must set exactly the cells selected by the balls of radius `r`
/// around `centers` on the cleared grid `union`. Lets a threaded caller
/// split the painting by word ranges.
pub fn build_cover_grid_using<S, F>(
    stream: &S,
    schedule: &RadiusSchedule,
    p: u64,
    checkpoints: &[u64],
    m: u32,
    mut paint: F,
) -> Result<GridCover>
where
    S: PointSource,
    F: FnMut(&[f64], f64, &mut GridCover),
{
    let d = stream.dim();
    grid::check_shape(d, m)?;
    let mut cap = stream.capacity();
    if let Some(len) = schedule.term_count() {
        cap = cap.min(len);
    }
    check_checkpoints(p, checkpoints, cap)?;
    let last = *checkpoints.last().expect("checked nonempty");
    let centers = stream.take_flat(last)?;

    let mut acc = GridCover::full(d, m)?;
    let mut union = GridCover::empty(d, m)?;
    for &n in checkpoints {
        let r = schedule.radius_at(n)?;
        if r > 0.5 {
            continue;
        }
        union.words_mut().iter_mut().for_each(|w| *w = 0);
        paint(&centers[..n as usize * d], r, &mut union);
        acc.intersect_with(&union)?;
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// Union of balls `B(c, r)` over the rows `c` of the flat `centers` buffer.
pub fn ball_union_grid(d: usize, centers: &[f64], r: f64, m: u32) -> Result<GridCover> {
    if d == 0 || centers.len() % d != 0 {
        return Err(Error::invalid("centers", "length is not a multiple of d"));
    }
    let mut g = GridCover::empty(d, m)?;
    g.paint_balls(centers, r, Membership::CellCenter);
    Ok(g)
}

/// Cells whose centre lies in `⋂_{j=l}^{q} F_j`, where
/// `F_j = ⋃_{n_{j-1} < k ≤ n_j} B(ω_k, ℓ_{n_{j+1}})` under `ℓ_n = c n^{-1/d}`
/// and the θ-ladder `n_j`.
pub fn liminf_witness_grid<S: PointSource>(
    stream: &S,
    c: f64,
    d: u32,
    theta: f64,
    l: u32,
    q: u32,
    m: u32,
) -> Result<GridCover> {
    liminf_witness_grid_using(stream, c, d, theta, l, q, m, |centers, r, union| {
        union.paint_balls(centers, r, Membership::CellCenter);
    })
}

/// [`liminf_witness_grid`] with a caller-supplied painter, as in
/// [`build_cover_grid_using`].
#[allow(clippy::too_many_arguments)]
pub fn liminf_witness_grid_using<S, F>(
    stream: &S,
    c: f64,
    d: u32,
    theta: f64,
    l: u32,
    q: u32,
    m: u32,
    mut paint: F,
) -> Result<GridCover>
where
    S: PointSource,
    F: FnMut(&[f64], f64, &mut GridCover),
{
    if stream.dim() != d as usize {
        return Err(Error::DimensionMismatch {
            expected: d as usize,
            actual: stream.dim(),
        });
    }
    check_witness_args(c, l, q)?;
    grid::check_shape(d as usize, m)?;
    let ladder = growth::ladder_seq(theta, q + 1)?;
    let top = ladder[q as usize];
    let centers = stream.take_flat(top)?;
    let dd = d as usize;

    let mut acc = GridCover::full(dd, m)?;
    let mut union = GridCover::empty(dd, m)?;
    for j in l as usize..=q as usize {
        let r = critical_radius(c, d, ladder[j + 1]);
        if r > 0.5 {
            continue;
        }
        let (lo, hi) = (ladder[j - 1] as usize, ladder[j] as usize);
        union.words_mut().iter_mut().for_each(|w| *w = 0);
        paint(&centers[lo * dd..hi * dd], r, &mut union);
        acc.intersect_with(&union)?;
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

pub(crate) fn check_witness_args(c: f64, l: u32, q: u32) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain("c", c, "(0, inf)"));
    }
    if l == 0 {
        return Err(Error::invalid("l", "must be at least 1 (n_{l-1} is used)"));
    }
    if q < l {
        return Err(Error::invalid("q", "must satisfy q >= l"));
    }
    Ok(())
}

/// Fraction of cells set in the cover grid over the dyadic ladder `p..=n_max`.
pub fn empirical_covered_fraction<S: PointSource>(
    stream: &S,
    schedule: &RadiusSchedule,
    p: u64,
    n_max: u64,
    m: u32,
) -> Result<f64> {
    let ladder = dyadic_ladder(p, n_max)?;
    Ok(build_cover_grid(stream, schedule, p, &ladder, m)?.fraction())
}

/// Default box-counting window `[⌈m/2⌉, m]`.
pub fn default_box_window(m: u32) -> (u32, u32) {
    (m.div_ceil(2), m)
}

/// An experiment repeated per seed by [`zero_one_probe`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "statistic", rename_all = "snake_case"))]
pub enum ProbeExperiment {
    /// Box-dimension estimate of the cover grid.
    BoxDim {
        schedule: RadiusSchedule,
        measure: MeasureModel,
        p: u64,
        n_max: u64,
        m: u32,
        m_lo: u32,
        m_hi: u32,
        membership: Membership,
    },
    /// Covered fraction of the cover grid.
    CoveredFraction {
        schedule: RadiusSchedule,
        measure: MeasureModel,
        p: u64,
        n_max: u64,
        m: u32,
    },
}

impl ProbeExperiment {
    /// Runs the experiment on the stream of `seed`.
    pub fn run(&self, seed: u64) -> Result<f64> {
        self.run_using(seed, |centers, r, union, membership| {
            union.paint_balls(centers, r, membership)
        })
    }

    /// As [`Self::run`] with a caller-supplied painter.
    pub fn run_using<F>(&self, seed: u64, mut paint: F) -> Result<f64>
    where
        F: FnMut(&[f64], f64, &mut GridCover, Membership),
    {
        match self {
            ProbeExperiment::BoxDim {
                schedule,
                measure,
                p,
                n_max,
                m,
                m_lo,
                m_hi,
                membership,
            } => {
                let stream = SampleStream::new(seed, *measure)?;
                let ladder = dyadic_ladder(*p, *n_max)?;
                let g = build_cover_grid_using(&stream, schedule, *p, &ladder, *m, |c, r, u| {
                    paint(c, r, u, *membership)
                })?;
                estimate_box_dim(&g, *m_lo, *m_hi)
            }
            ProbeExperiment::CoveredFraction {
                schedule,
                measure,
                p,
                n_max,
                m,
            } => {
                let stream = SampleStream::new(seed, *measure)?;
                let ladder = dyadic_ladder(*p, *n_max)?;
                let g = build_cover_grid_using(&stream, schedule, *p, &ladder, *m, |c, r, u| {
                    paint(c, r, u, Membership::CellCenter)
                })?;
                Ok(g.fraction())
            }
        }
    }
}

/// Per-seed statistics of an experiment and their spread.
pub fn zero_one_probe(experiment: &ProbeExperiment, seeds: &[u64]) -> Result<Spread> {
    if seeds.len() < 2 {
        return Err(Error::invalid("seeds", "need at least two seeds"));
    }
    let values = seeds.iter().map(|&s| experiment.run(s)).collect::<Result<Vec<_>>>()?;
    Ok(Spread::of(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::ExplicitStream;

    #[test]
    fn ladder_shape() {
        assert_eq!(dyadic_ladder(256, 1024).unwrap(), [256, 512, 1024]);
        assert_eq!(dyadic_ladder(3, 20).unwrap(), [3, 4, 8, 16, 20]);
        assert_eq!(dyadic_ladder(5, 5).unwrap(), [5]);
        assert!(dyadic_ladder(6, 5).is_err());
    }

    #[test]
    fn huge_radius_covers_everything() {
        let s = SampleStream::uniform(3, 2).unwrap();
        let sched = RadiusSchedule::power_law(100.0, 0.5).unwrap();
        let g = build_cover_grid(&s, &sched, 4, &[4], 5).unwrap();
        assert_eq!(g.fraction(), 1.0);
    }

    #[test]
    fn forced_stream_example() {
        let s = ExplicitStream::from_scalars(&[0.1, 0.6]).unwrap();
        let sched = RadiusSchedule::explicit(alloc::vec![0.3, 0.1]).unwrap();
        let g = build_cover_grid(&s, &sched, 2, &[2], 3).unwrap();
        assert_eq!(g.ones().collect::<Vec<_>>(), [0, 1, 4, 5]);
    }

    #[test]
    fn adding_a_checkpoint_shrinks_the_set() {
        let s = SampleStream::uniform(11, 1).unwrap();
        let sched = RadiusSchedule::power_law(0.5, 1.0).unwrap();
        let a = build_cover_grid(&s, &sched, 8, &[8, 16], 10).unwrap();
        let b = build_cover_grid(&s, &sched, 8, &[8, 16, 32], 10).unwrap();
        assert!(b.is_subset_of(&a).unwrap());
    }

    #[test]
    fn witness_with_large_radii_is_full() {
        let s = SampleStream::uniform(1, 1).unwrap();
        let g = liminf_witness_grid(&s, 10.0, 1, 2.0, 2, 2, 8).unwrap();
        assert_eq!(g.fraction(), 1.0);
    }

    #[test]
    fn witness_mass_is_monotone_in_q() {
        let s = SampleStream::uniform(5, 1).unwrap();
        let mut prev = 1.0;
        for q in 3..9 {
            let f = liminf_witness_grid(&s, 1.0, 1, 2.0, 3, q, 12).unwrap().fraction();
            assert!(f <= prev);
            prev = f;
        }
    }

    #[test]
    fn constant_statistic_has_zero_spread() {
        let exp = ProbeExperiment::CoveredFraction {
            schedule: RadiusSchedule::power_law(10.0, 0.1).unwrap(),
            measure: MeasureModel::uniform(1).unwrap(),
            p: 2,
            n_max: 16,
            m: 6,
        };
        let sp = zero_one_probe(&exp, &[1, 2, 3]).unwrap();
        assert_eq!(sp.std_dev, 0.0);
        assert_eq!(sp.mean, 1.0);
    }
}
