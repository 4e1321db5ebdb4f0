//! First hitting times `τ(ω, y, r) = inf{n ≥ 1 : ω_n ∈ B(y, r)}` and the
//! upper hitting exponent `H̄(ω, y) = limsup_{r→0} ln τ / (-ln r)`.

use alloc::vec::Vec;

use crate::geometry::{wrap_dist, TorusPoint};
use crate::math;
use crate::stream::PointSource;
use crate::{Error, Result};

/// A first hitting index, or the scan limit when the ball was never hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Tau {
    Hit(u64),
    NotHitWithin(u64),
}

impl Tau {
    pub fn hit(self) -> Option<u64> {
        match self {
            Tau::Hit(n) => Some(n),
            Tau::NotHitWithin(_) => None,
        }
    }
}

fn check_probe<S: PointSource>(stream: &S, y: &TorusPoint) -> Result<()> {
    if y.dim() != stream.dim() {
        return Err(Error::DimensionMismatch {
            expected: stream.dim(),
            actual: y.dim(),
        });
    }
    Ok(())
}

fn check_scan(n_max: u64, capacity: u64) -> Result<()> {
    if n_max == 0 {
        return Err(Error::invalid("n_max", "must be at least 1"));
    }
    if n_max > capacity {
        return Err(Error::OutOfRange {
            index: n_max,
            len: capacity,
        });
    }
    Ok(())
}

pub fn hitting_time<S: PointSource>(stream: &S, y: &TorusPoint, r: f64, n_max: u64) -> Result<Tau> {
    check_probe(stream, y)?;
    if !(r > 0.0) {
        return Err(Error::domain("r", r, "(0, inf)"));
    }
    check_scan(n_max, stream.capacity())?;
    let mut buf = alloc::vec![0.0; stream.dim()];
    for n in 1..=n_max {
        stream.fill(n, &mut buf);
        if wrap_dist(&buf, y.coords()) < r {
            return Ok(Tau::Hit(n));
        }
    }
    Ok(Tau::NotHitWithin(n_max))
}

/// Hitting times of a decreasing ladder of radii, with exponent estimates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HittingRecord {
    pub probe: TorusPoint,
    pub radii: Vec<f64>,
    pub taus: Vec<Tau>,
    /// Max of `ln τ / -ln r` over the estimation window; `None` if no
    /// radius below 1 was hit.
    pub h_upper_estimate: Option<f64>,
    /// Min over the same window.
    pub h_lower_estimate: Option<f64>,
}

/// Fraction of the hit radii, counted from the smallest, that the exponent
/// estimates look at.
pub const DEFAULT_WINDOW: f64 = 1.0 / 3.0;

/// `(max, min)` of `ln τ_j / -ln r_j` over the deepest `window` fraction
/// (rounded up) of the hit radii below 1.
pub fn exponent_window(radii: &[f64], taus: &[Tau], window: f64) -> Option<(f64, f64)> {
    let hits: Vec<(f64, u64)> = radii
        .iter()
        .zip(taus)
        .filter_map(|(&r, t)| t.hit().filter(|_| r < 1.0).map(|n| (r, n)))
        .collect();
    if hits.is_empty() {
        return None;
    }
    let take = math::ceil(hits.len() as f64 * window.clamp(0.0, 1.0)).max(1.0) as usize;
    let ratios = hits[hits.len() - take..]
        .iter()
        .map(|&(r, n)| math::ln(n as f64) / -math::ln(r));
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for v in ratios {
        hi = hi.max(v);
        lo = lo.min(v);
    }
    Some((hi, lo))
}

/// `r_j = r_hi 2^{-j}`, `j = 0..k`.
pub fn halving_radii(r_hi: f64, k: usize) -> Vec<f64> {
    (0..k).map(|j| r_hi * math::powi(0.5, j as i32)).collect()
}

/// First hitting times of every probe for every radius of a decreasing
/// ladder, found in one pass over `ω_1..=ω_{n_max}`.
pub fn hitting_times_many<S: PointSource>(
    stream: &S,
    probes: &[TorusPoint],
    radii: &[f64],
    n_max: u64,
) -> Result<Vec<Vec<Tau>>> {
    for y in probes {
        check_probe(stream, y)?;
    }
    check_scan(n_max, stream.capacity())?;
    if radii.windows(2).any(|w| w[1] > w[0]) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::invalid("radii", "must be positive and nonincreasing"));
    }
    let k = radii.len();
    let mut taus = alloc::vec![alloc::vec![Tau::NotHitWithin(n_max); k]; probes.len()];
    // index of the largest radius each probe has not hit yet
    let mut next = alloc::vec![0usize; probes.len()];
    let mut open: Vec<usize> = (0..probes.len()).filter(|_| k > 0).collect();
    let mut buf = alloc::vec![0.0; stream.dim()];
    let mut n = 1;
    while n <= n_max && !open.is_empty() {
        stream.fill(n, &mut buf);
        open.retain(|&p| {
            let j = &mut next[p];
            let dist = wrap_dist(&buf, probes[p].coords());
            while *j < k && dist < radii[*j] {
                taus[p][*j] = Tau::Hit(n);
                *j += 1;
            }
            *j < k
        });
        n += 1;
    }
    Ok(taus)
}

pub fn hitting_ladder<S: PointSource>(
    stream: &S,
    y: &TorusPoint,
    r_hi: f64,
    k: usize,
    n_max: u64,
) -> Result<HittingRecord> {
    hitting_ladder_with(stream, y, r_hi, k, n_max, DEFAULT_WINDOW)
}

pub fn hitting_ladder_with<S: PointSource>(
    stream: &S,
    y: &TorusPoint,
    r_hi: f64,
    k: usize,
    n_max: u64,
    window: f64,
) -> Result<HittingRecord> {
    Ok(
        hitting_ladders(stream, core::slice::from_ref(y), r_hi, k, n_max, window)?
            .pop()
            .expect("one probe"),
    )
}

/// [`hitting_ladder_with`] for many probes sharing one pass over the stream.
pub fn hitting_ladders<S: PointSource>(
    stream: &S,
    probes: &[TorusPoint],
    r_hi: f64,
    k: usize,
    n_max: u64,
    window: f64,
) -> Result<Vec<HittingRecord>> {
    if !(r_hi > 0.0 && r_hi <= 0.5) {
        return Err(Error::domain("r_hi", r_hi, "(0, 1/2]"));
    }
    if k < 2 {
        return Err(Error::invalid("k", "ladder needs at least two radii"));
    }
    let radii = halving_radii(r_hi, k);
    let taus = hitting_times_many(stream, probes, &radii, n_max)?;
    Ok(probes
        .iter()
        .zip(taus)
        .map(|(y, taus)| {
            let est = exponent_window(&radii, &taus, window);
            HittingRecord {
                probe: y.clone(),
                radii: radii.clone(),
                taus,
                h_upper_estimate: est.map(|e| e.0),
                h_lower_estimate: est.map(|e| e.1),
            }
        })
        .collect())
}

/// Finite window for [`inclusion_check`]: checkpoints are the powers of two
/// in `[p, n]` (plus `p` and `n`), and hitting times feeding the exponent
/// estimate are scanned up to `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InclusionWindow {
    pub p: u64,
    pub n: u64,
    pub n_max: u64,
}

impl Default for InclusionWindow {
    fn default() -> Self {
        Self {
            p: 1 << 8,
            n: 1 << 16,
            n_max: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InclusionSide {
    /// Estimate below `1/α - margin`: the probe should be covered.
    Member,
    /// Estimate above `1/α + margin`: the probe should leave the cover.
    Exits,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InclusionViolation {
    pub probe: usize,
    pub estimate: f64,
    pub expected: InclusionSide,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InclusionReport {
    pub violations: Vec<InclusionViolation>,
    /// Probes whose estimate fell outside the margin band and were checked.
    pub total: usize,
    pub member_checked: usize,
    pub exit_checked: usize,
    /// Probes inside the band or with no usable estimate.
    pub skipped: usize,
}

/// Checks, probe by probe, that a small hitting exponent implies membership
/// in the finite-window cover for `ℓ_n = n^{-α}` and a large one implies
/// leaving it at some checkpoint.
pub fn inclusion_check<S: PointSource>(
    stream: &S,
    alpha: f64,
    probes: &[TorusPoint],
    margin: f64,
    window: InclusionWindow,
) -> Result<InclusionReport> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain("alpha", alpha, "(0, inf)"));
    }
    if !(margin > 0.0) {
        return Err(Error::domain("margin", margin, "(0, inf)"));
    }
    let InclusionWindow { p, n, n_max } = window;
    let checkpoints = crate::covering::dyadic_ladder(p, n)?;
    let radius = |k: u64| math::powf(k as f64, -alpha);

    // exponent estimates over ℓ_p down to ℓ_N in halvings
    let r_hi = radius(p).min(0.5);
    let r_lo = radius(n);
    let mut est_radii = alloc::vec![r_hi];
    while est_radii.len() < 2 || *est_radii.last().expect("nonempty") * 0.5 >= r_lo {
        let r = est_radii.last().expect("nonempty") * 0.5;
        est_radii.push(r);
    }
    let est_taus = hitting_times_many(stream, probes, &est_radii, n_max)?;

    let cover_radii: Vec<f64> = checkpoints.iter().map(|&k| radius(k)).collect();
    let cover_taus = hitting_times_many(stream, probes, &cover_radii, n)?;

    let target = 1.0 / alpha;
    let mut report = InclusionReport {
        violations: Vec::new(),
        total: 0,
        member_checked: 0,
        exit_checked: 0,
        skipped: 0,
    };
    for (i, (et, ct)) in est_taus.iter().zip(&cover_taus).enumerate() {
        let Some((est, _)) = exponent_window(&est_radii, et, DEFAULT_WINDOW) else {
            report.skipped += 1;
            continue;
        };
        // covered at checkpoint N' iff some ω_k, k ≤ N', lies within ℓ_{N'}
        let covered_at = |j: usize| matches!(ct[j], Tau::Hit(t) if t <= checkpoints[j]);
        let side = if est < target - margin {
            report.member_checked += 1;
            let ok = (0..checkpoints.len()).all(covered_at);
            (!ok).then_some(InclusionSide::Member)
        } else if est > target + margin {
            report.exit_checked += 1;
            let ok = !(0..checkpoints.len()).all(covered_at);
            (!ok).then_some(InclusionSide::Exits)
        } else {
            report.skipped += 1;
            continue;
        };
        report.total += 1;
        if let Some(expected) = side {
            report.violations.push(InclusionViolation {
                probe: i,
                estimate: est,
                expected,
            });
        }
    }
    Ok(report)
}
