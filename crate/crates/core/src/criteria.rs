//! Measure-dichotomy classification of `(schedule, measure)` pairs.
//!
//! With `m_n = μ(B(y, ℓ_n))`, a point `y` belongs to `E(ℓ)` when
//! `Σ m_n = ∞` (first series) and `Σ m_n e^{-n m_n} < ∞` (second series);
//! for homogeneous measures `E(ℓ)` is all-or-nothing and so is `μ(U)`. The
//! countability series is `Σ n · μ(B(y, ℓ_n + ℓ_{n+1}))`; when it converges
//! the covering set is almost surely the countable set of sample points.

use alloc::string::String;
use alloc::vec::Vec;

use crate::math;
use crate::measure::MeasureModel;
use crate::schedule::RadiusSchedule;
use crate::stats;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Verdict {
    FullMeasure,
    ZeroMeasure,
    /// Almost surely `U(ω, ℓ) = {ω_k}`; in particular a null set.
    CountableAS,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SeriesStatus {
    Diverges,
    Converges,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DichotomyVerdict {
    pub verdict: Verdict,
    pub first_series: SeriesStatus,
    pub second_series: SeriesStatus,
    pub countability_series: SeriesStatus,
    /// Whether `n · m_n` is nondecreasing.
    pub monotonicity_hypothesis_holds: bool,
    pub notes: String,
}

/// Tolerance for treating `α k` as exactly 1 or 2.
pub const EXPONENT_TOL: f64 = 1e-12;

const SECOND_SERIES_NOTE: &str = "second series weighted by ball mass, \
sum m_n exp(-n m_n); the radius-weighted variant sum l_n exp(-n (2 l_n)^k) \
gives the same verdict for power laws since the first series already \
diverges only when alpha*k <= 1";

pub fn classify_dichotomy(schedule: &RadiusSchedule, measure: &MeasureModel) -> Result<DichotomyVerdict> {
    schedule.validate()?;
    measure.validate()?;
    if !measure.is_homogeneous() {
        return Err(Error::Unsupported(
            "ball mass depends on the centre; E(l) need not be all-or-nothing".into(),
        ));
    }
    let Some((_, alpha)) = schedule.power_params() else {
        return Ok(DichotomyVerdict {
            verdict: Verdict::Unknown,
            first_series: SeriesStatus::Undecided,
            second_series: SeriesStatus::Undecided,
            countability_series: SeriesStatus::Undecided,
            monotonicity_hypothesis_holds: false,
            notes: "explicit schedule: a finite prefix decides no series; \
                    see the partial-sum diagnostics"
                .into(),
        });
    };
    let k = measure.support_dim() as f64;
    let ak = alpha * k;
    let is_one = math::abs(ak - 1.0) <= EXPONENT_TOL;
    let is_two = math::abs(ak - 2.0) <= EXPONENT_TOL;
    let mut notes = alloc::format!("alpha*k = {ak}; {SECOND_SERIES_NOTE}");

    let (verdict, first, second, count) = if is_one {
        notes.push_str(
            "; alpha*k = 1: n m_n is eventually the constant (2c)^k, so the \
             second-series terms behave like (2c)^k exp(-(2c)^k) / n",
        );
        (
            Verdict::ZeroMeasure,
            SeriesStatus::Diverges,
            SeriesStatus::Diverges,
            SeriesStatus::Diverges,
        )
    } else if ak < 1.0 {
        (
            Verdict::FullMeasure,
            SeriesStatus::Diverges,
            SeriesStatus::Converges,
            SeriesStatus::Diverges,
        )
    } else if ak < 2.0 || is_two {
        notes.push_str(
            "; 1 < alpha*k <= 2: the first series converges so E(l) is empty; \
             countability is not concluded",
        );
        (
            Verdict::ZeroMeasure,
            SeriesStatus::Converges,
            SeriesStatus::Converges,
            SeriesStatus::Diverges,
        )
    } else {
        (
            Verdict::CountableAS,
            SeriesStatus::Converges,
            SeriesStatus::Converges,
            SeriesStatus::Converges,
        )
    };
    let monotone = ak <= 1.0 + EXPONENT_TOL;
    if !monotone {
        notes.push_str(
            "; n m_n is not nondecreasing, so the zero-measure verdict rests on \
             the convergent first series alone",
        );
    }
    Ok(DichotomyVerdict {
        verdict,
        first_series: first,
        second_series: second,
        countability_series: count,
        monotonicity_hypothesis_holds: monotone,
        notes,
    })
}

/// One term of each series at index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeriesRow {
    pub n: u64,
    /// `m_n`
    pub term1: f64,
    /// `m_n e^{-n m_n}`
    pub term2: f64,
    /// `n μ(B(y, ℓ_n + ℓ_{n+1}))`; absent on the last term of an explicit list.
    pub term3: Option<f64>,
    pub partial1: f64,
    pub partial2: f64,
    pub partial3: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeriesDiagnostics {
    /// Number of terms actually summed (explicit lists may be shorter).
    pub terms: u64,
    pub partial1: f64,
    pub partial2: f64,
    pub partial3: f64,
    /// Log-log slopes of the terms over the last decade `[N/10, N]`.
    pub tail_exponent1: Option<f64>,
    pub tail_exponent2: Option<f64>,
    pub tail_exponent3: Option<f64>,
}

fn for_each_row<F: FnMut(SeriesRow)>(
    schedule: &RadiusSchedule,
    measure: &MeasureModel,
    n_max: u64,
    mut f: F,
) -> Result<u64> {
    schedule.validate()?;
    measure.validate()?;
    if n_max == 0 {
        return Err(Error::invalid("N", "must be at least 1"));
    }
    let last = schedule.term_count().map_or(n_max, |len| len.min(n_max));
    let (mut p1, mut p2, mut p3) = (0.0, 0.0, 0.0);
    let mut r = schedule.radius_at(1)?;
    for n in 1..=last {
        let next = match schedule.term_count() {
            Some(len) if n >= len => None,
            _ => Some(schedule.radius_at(n + 1)?),
        };
        let m = measure.support_ball_mass(r);
        let t2 = m * math::exp(-(n as f64) * m);
        let t3 = next.map(|rn| n as f64 * measure.support_ball_mass(r + rn));
        p1 += m;
        p2 += t2;
        p3 += t3.unwrap_or(0.0);
        f(SeriesRow {
            n,
            term1: m,
            term2: t2,
            term3: t3,
            partial1: p1,
            partial2: p2,
            partial3: p3,
        });
        if let Some(rn) = next {
            r = rn;
        }
    }
    Ok(last)
}

/// Every row `n = 1..=N` (clamped to the list length for explicit schedules).
pub fn series_rows(schedule: &RadiusSchedule, measure: &MeasureModel, n_max: u64) -> Result<Vec<SeriesRow>> {
    let mut rows = Vec::new();
    for_each_row(schedule, measure, n_max, |r| rows.push(r))?;
    Ok(rows)
}

/// Partial sums up to `N` and tail exponents fitted over `[N/10, N]`.
/// Diagnostics only: nothing here claims convergence.
pub fn series_partial_diagnostics(
    schedule: &RadiusSchedule,
    measure: &MeasureModel,
    n_max: u64,
) -> Result<SeriesDiagnostics> {
    let last = schedule.term_count().map_or(n_max, |len| len.min(n_max));
    let from = (last / 10).max(1);
    let mut fits: [(Vec<f64>, Vec<f64>); 3] = Default::default();
    let mut out = SeriesDiagnostics {
        terms: 0,
        partial1: 0.0,
        partial2: 0.0,
        partial3: 0.0,
        tail_exponent1: None,
        tail_exponent2: None,
        tail_exponent3: None,
    };
    // thin the decade to a few hundred log-spaced samples
    let stride = ((last - from + 1) / 512).max(1);
    out.terms = for_each_row(schedule, measure, n_max, |row| {
        out.partial1 = row.partial1;
        out.partial2 = row.partial2;
        out.partial3 = row.partial3;
        if row.n >= from && ((row.n - from) % stride == 0 || row.n == last) {
            let ln_n = math::ln(row.n as f64);
            for (fit, t) in fits.iter_mut().zip([Some(row.term1), Some(row.term2), row.term3]) {
                if let Some(t) = t.filter(|&t| t > 0.0) {
                    fit.0.push(ln_n);
                    fit.1.push(math::ln(t));
                }
            }
        }
    })?;
    let [a, b, c] = fits.map(|(x, y)| if x.len() >= 2 { stats::ls_slope(&x, &y) } else { None });
    out.tail_exponent1 = a;
    out.tail_exponent2 = b;
    out.tail_exponent3 = c;
    Ok(out)
}
