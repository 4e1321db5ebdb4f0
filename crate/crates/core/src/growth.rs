//! The greedy covering construction for the critical family and the
//! second-moment kernel of the liminf witness set.
//!
//! Throughout, `ℓ_n = c n^{-1/d}` and `n_j` is the integer θ-ladder from
//! [`ladder`].

use alloc::vec::Vec;

use crate::bounds::{hit_exponent, s_exponent};
use crate::geometry::{axis_dist, torus_norm, wrap_dist, TorusPoint};
use crate::math;
use crate::schedule::critical_radius;
use crate::spatial::PeriodicIndex;
use crate::stats;
use crate::stream::{PointSource, SampleStream, STREAM_CAPACITY};
use crate::{Error, Result};

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 1.0 {
        Ok(())
    } else {
        Err(Error::domain("theta", theta, "(1, inf)"))
    }
}

/// `n_0, …, n_{j_max}` with `n_0 = 1` and `n_j = max(⌈θ^j⌉, n_{j-1} + 1)`.
///
/// Powers that land within `1e-9` (relative) of an integer are rounded to
/// it first, so `θ = 10` gives exactly `1000` at `j = 3`.
pub fn ladder_seq(theta: f64, j_max: u32) -> Result<Vec<u64>> {
    check_theta(theta)?;
    let mut out = Vec::with_capacity(j_max as usize + 1);
    let mut prev = 0u64;
    for j in 0..=j_max {
        let v = math::powf(theta, j as f64);
        let r = math::round(v);
        let v = if math::abs(v - r) <= 1e-9 * r { r } else { math::ceil(v) };
        if !(v <= STREAM_CAPACITY as f64) {
            return Err(Error::Resource(alloc::format!(
                "ladder index n_{j} = {v:e} exceeds the stream capacity"
            )));
        }
        let n = (v as u64).max(prev + 1);
        out.push(n);
        prev = n;
    }
    Ok(out)
}

pub fn ladder(theta: f64, j: u32) -> Result<u64> {
    Ok(*ladder_seq(theta, j)?.last().expect("nonempty"))
}

/// `(N_i, Q_i) = (#I_i, #J_i)` at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelCount {
    pub i: u32,
    pub n_i: u64,
    pub big_n: u64,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverGrowthTrace {
    pub theta: f64,
    pub c: f64,
    pub d: u32,
    pub l: u32,
    /// `n_0, …, n_{i_max + 2}`.
    pub ladder: Vec<u64>,
    pub levels: Vec<LevelCount>,
    /// `Λ^{i-l}` per level.
    pub predicted: Vec<f64>,
    /// Least-squares slope of `ln(N_i + Q_i)` against `i - l`.
    pub fitted_rate: f64,
}

/// The trace plus the index sets `I_{i_max}` and `J_{i_max}` (1-based,
/// increasing).
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyCover {
    pub trace: CoverGrowthTrace,
    pub members: Vec<u64>,
    pub frontier: Vec<u64>,
}

/// Runs the construction from `I_l = {1, …, n_l}`, `J_l = ∅`.
///
/// At level `i`, with `H_i` the union of `B(ω_h, ℓ_{n_i})` over
/// `h ∈ I_i ∪ J_i` and `ρ` the distance from `ω_k` to those centres, an index
/// `k ∈ (n_i, n_{i+1}]` joins `T_{i+1}` when `ρ < ℓ_{n_i} + ℓ_{n_{i+2}}` and
/// joins `J_{i+1}` when `ℓ_{n_i} + ℓ_{n_{i+2}} ≤ ρ < ℓ_{n_i} + ℓ_{n_{i+1}}`
/// (the second bound says `B(ω_k, ℓ_{n_{i+1}})` meets `H_i`). Then
/// `I_{i+1} = I_i ∪ T_{i+1}`.
pub fn greedy_cover<S: PointSource>(stream: &S, c: f64, d: u32, theta: f64, l: u32, i_max: u32) -> Result<GreedyCover> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain("c", c, "(0, inf)"));
    }
    if stream.dim() != d as usize {
        return Err(Error::DimensionMismatch {
            expected: d as usize,
            actual: stream.dim(),
        });
    }
    if i_max < l {
        return Err(Error::invalid("i_max", "must satisfy i_max >= l"));
    }
    let ladder = ladder_seq(theta, i_max + 2)?;
    if ladder[i_max as usize] > stream.capacity() {
        return Err(Error::OutOfRange {
            index: ladder[i_max as usize],
            len: stream.capacity(),
        });
    }
    let dd = d as usize;
    let ell = |j: u32| critical_radius(c, d, ladder[j as usize]);

    let mut members: Vec<u64> = (1..=ladder[l as usize]).collect();
    let mut frontier: Vec<u64> = Vec::new();
    let mut levels = alloc::vec![LevelCount {
        i: l,
        n_i: ladder[l as usize],
        big_n: members.len() as u64,
        q: 0,
    }];
    let mut buf = alloc::vec![0.0; dd];
    for i in l..i_max {
        let near = ell(i) + ell(i + 2);
        let touch = ell(i) + ell(i + 1);
        let mut centers = Vec::with_capacity((members.len() + frontier.len()) * dd);
        for &h in members.iter().chain(&frontier) {
            stream.fill(h, &mut buf);
            centers.extend_from_slice(&buf);
        }
        let index = PeriodicIndex::build(dd, centers, touch);
        let mut joined = Vec::new();
        let mut next_frontier = Vec::new();
        for k in ladder[i as usize] + 1..=ladder[i as usize + 1] {
            stream.fill(k, &mut buf);
            match index.nearest_within(&buf, touch) {
                Some(rho) if rho < near => joined.push(k),
                Some(_) => next_frontier.push(k),
                None => {}
            }
        }
        members.extend(joined);
        debug_assert!(next_frontier.iter().all(|k| members.binary_search(k).is_err()));
        frontier = next_frontier;
        levels.push(LevelCount {
            i: i + 1,
            n_i: ladder[i as usize + 1],
            big_n: members.len() as u64,
            q: frontier.len() as u64,
        });
    }

    let lambda = crate::bounds::lambda_matrix(c, d, theta)?.lambda;
    let predicted = levels.iter().map(|lv| math::powi(lambda, (lv.i - l) as i32)).collect();
    let xs: Vec<f64> = levels.iter().map(|lv| (lv.i - l) as f64).collect();
    let ys: Vec<f64> = levels.iter().map(|lv| math::ln((lv.big_n + lv.q) as f64)).collect();
    let fitted_rate = stats::ls_slope(&xs, &ys).unwrap_or(0.0);
    Ok(GreedyCover {
        trace: CoverGrowthTrace {
            theta,
            c,
            d,
            l,
            ladder,
            levels,
            predicted,
            fitted_rate,
        },
        members,
        frontier,
    })
}

pub fn greedy_cover_trace<S: PointSource>(
    stream: &S,
    c: f64,
    d: u32,
    theta: f64,
    l: u32,
    i_max: u32,
) -> Result<CoverGrowthTrace> {
    Ok(greedy_cover(stream, c, d, theta, l, i_max)?.trace)
}

/// Per-level miss probabilities `A_j = (1 - (2ℓ_{n_{j+1}})^d)^{n_j - n_{j-1}}`
/// and their complements, with the level radius, for `j = l..=q`.
struct Level {
    radius: f64,
    miss: f64,
    hit: f64,
}

fn levels(theta: f64, c: f64, d: u32, l: u32, q: u32) -> Result<Vec<Level>> {
    crate::covering::check_witness_args(c, l, q)?;
    if d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    let ladder = ladder_seq(theta, q + 1)?;
    Ok((l..=q)
        .map(|j| {
            let j = j as usize;
            let radius = critical_radius(c, d, ladder[j + 1]);
            let p = math::powi(2.0 * radius, d as i32);
            let (miss, hit) = math::miss_and_hit(p, (ladder[j] - ladder[j - 1]) as f64);
            Level { radius, miss, hit }
        })
        .collect())
}

/// `Ψ_{l,q}(t) = ∏_{j=l}^{q} (1 + A_j / (1 - A_j) · 1[‖t‖ < ℓ_{n_{j+1}}])`.
pub fn psi_kernel(t: &TorusPoint, theta: f64, c: f64, d: u32, l: u32, q: u32) -> Result<f64> {
    if t.dim() != d as usize {
        return Err(Error::DimensionMismatch {
            expected: d as usize,
            actual: t.dim(),
        });
    }
    let norm = torus_norm(t.coords());
    let mut acc = 1.0;
    for lv in levels(theta, c, d, l, q)? {
        if norm < lv.radius {
            if !(lv.hit > 0.0) {
                return Err(Error::NonFinite { theta });
            }
            acc /= lv.hit;
        }
    }
    Ok(acc)
}

/// `K_{l,q} = ∏_{j=l}^{q} (1 - A_j)`, the expected mass of the witness set.
pub fn k_mass(theta: f64, c: f64, d: u32, l: u32, q: u32) -> Result<f64> {
    Ok(levels(theta, c, d, l, q)?.iter().map(|lv| lv.hit).product())
}

/// Miss probabilities `A_j` for `j = l..=q`.
pub fn miss_probabilities(theta: f64, c: f64, d: u32, l: u32, q: u32) -> Result<Vec<f64>> {
    Ok(levels(theta, c, d, l, q)?.iter().map(|lv| lv.miss).collect())
}

/// `C_l = c^{s(c,θ)} (1 - e^{-(2c)^d (θ-1)/θ²})^l`.
pub fn c_l(c: f64, d: u32, theta: f64, l: u32) -> Result<f64> {
    let s = s_exponent(c, d, theta)?;
    let x = hit_exponent(c, d, theta);
    let log = s * math::ln(c) + l as f64 * math::ln_one_minus_exp_neg(x);
    Ok(math::exp(log))
}

/// Monte Carlo check of the pair-indicator bound for one `(x, y, ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairIndicatorReport {
    /// Fraction of draws `ω` with both `x, y ∈ B(ω, ℓ)`.
    pub estimate: f64,
    /// `μ(B(0, ℓ)) · 1[‖x - y‖ < 2ℓ]`.
    pub bound: f64,
    /// `∏ max(0, 2ℓ - |x_i - y_i|)`, exact for `ℓ ≤ 1/4`.
    pub exact: Option<f64>,
    /// Fraction of draws with neither point covered.
    pub complement_estimate: f64,
    /// `1 - 2 μ(B(0, ℓ)) + bound`.
    pub complement_bound: f64,
    /// Binomial standard error at the bound value.
    pub sigma: f64,
    pub trials: u64,
}

pub fn pair_indicator_bound_mc(
    x: &TorusPoint,
    y: &TorusPoint,
    ell: f64,
    trials: u64,
    seed: u64,
) -> Result<PairIndicatorReport> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            actual: y.dim(),
        });
    }
    if !(ell > 0.0) {
        return Err(Error::domain("ell", ell, "(0, inf)"));
    }
    if trials < 1000 {
        return Err(Error::invalid("trials", "need at least 1000 trials"));
    }
    let d = x.dim();
    let stream = SampleStream::uniform(seed, d)?;
    let mut buf = alloc::vec![0.0; d];
    let (mut both, mut neither) = (0u64, 0u64);
    for n in 1..=trials {
        stream.fill(n, &mut buf);
        let in_x = wrap_dist(&buf, x.coords()) < ell;
        let in_y = wrap_dist(&buf, y.coords()) < ell;
        both += (in_x && in_y) as u64;
        neither += (!in_x && !in_y) as u64;
    }
    let mass = math::powi(2.0 * ell, d as i32).min(1.0);
    let close = wrap_dist(x.coords(), y.coords()) < 2.0 * ell;
    let bound = if close { mass } else { 0.0 };
    let exact = (ell <= 0.25).then(|| {
        x.coords()
            .iter()
            .zip(y.coords())
            .map(|(&a, &b)| (2.0 * ell - axis_dist(a, b)).max(0.0))
            .product()
    });
    let n = trials as f64;
    Ok(PairIndicatorReport {
        estimate: both as f64 / n,
        bound,
        exact,
        complement_estimate: neither as f64 / n,
        complement_bound: 1.0 - 2.0 * mass + bound,
        sigma: math::sqrt(bound * (1.0 - bound) / n),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_examples() {
        assert_eq!(ladder(2.0, 10).unwrap(), 1024);
        assert_eq!(ladder(10.0, 3).unwrap(), 1000);
        assert_eq!(ladder_seq(1.5, 4).unwrap(), [1, 2, 3, 4, 6]);
        assert_eq!(ladder_seq(1.01, 3).unwrap(), [1, 2, 3, 4]);
        assert!(ladder(10.0, 40).unwrap_err().is_resource());
    }

    #[test]
    fn k_single_factor() {
        let lad = ladder_seq(2.0, 4).unwrap();
        let p = 2.0 * critical_radius(1.0, 1, lad[4]);
        let expect = 1.0 - libm::pow(1.0 - p, (lad[3] - lad[2]) as f64);
        assert!((k_mass(2.0, 1.0, 1, 3, 3).unwrap() - expect).abs() < 1e-15);
        assert_eq!(k_mass(2.0, 100.0, 1, 1, 3).unwrap(), 1.0);
    }

    #[test]
    fn psi_is_one_far_from_zero() {
        let t = TorusPoint::new(alloc::vec![0.4]).unwrap();
        assert_eq!(psi_kernel(&t, 2.0, 1.0, 1, 3, 8).unwrap(), 1.0);
        let z = TorusPoint::origin(1).unwrap();
        let full: f64 = levels(2.0, 1.0, 1, 3, 8)
            .unwrap()
            .iter()
            .map(|lv| 1.0 / lv.hit)
            .product();
        assert!((psi_kernel(&z, 2.0, 1.0, 1, 3, 8).unwrap() - full).abs() < 1e-12 * full);
    }

    #[test]
    fn level_counts_start_at_n_l() {
        let s = SampleStream::uniform(2, 1).unwrap();
        let tr = greedy_cover_trace(&s, 0.1, 1, 2.0, 3, 8).unwrap();
        assert_eq!(
            tr.levels[0],
            LevelCount {
                i: 3,
                n_i: 8,
                big_n: 8,
                q: 0
            }
        );
        assert!(tr.levels.windows(2).all(|w| w[1].big_n >= w[0].big_n));
    }

    #[test]
    fn far_pair_never_both_covered() {
        let x = TorusPoint::new(alloc::vec![0.0]).unwrap();
        let y = TorusPoint::new(alloc::vec![0.5]).unwrap();
        let r = pair_indicator_bound_mc(&x, &y, 0.1, 5000, 1).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.bound, 0.0);
    }
}
