//! One-dimensional optimisation over `θ ∈ (1, θ_max]`.
//!
//! The objectives here are cheap but not known to be unimodal, so the
//! search scans a log-spaced grid first and only then refines the best cell
//! by golden-section search in `ln θ`.

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Min,
    Max,
}

impl Mode {
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Mode::Min => a < b,
            Mode::Max => a > b,
        }
    }
}

/// Location of an optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaStar {
    At(f64),
    /// The objective keeps improving up to the bracket edge; the optimum is
    /// a limit as `θ → ∞`, not a finite point.
    LimitAtInfinity,
}

impl ThetaStar {
    pub fn finite(self) -> Option<f64> {
        match self {
            ThetaStar::At(t) => Some(t),
            ThetaStar::LimitAtInfinity => None,
        }
    }
}

#[cfg(feature = "serde")]
const LIMIT_TAG: &str = "limit_at_infinity";

#[cfg(feature = "serde")]
impl serde::Serialize for ThetaStar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            ThetaStar::At(t) => s.serialize_f64(*t),
            ThetaStar::LimitAtInfinity => s.serialize_str(LIMIT_TAG),
        }
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for ThetaStar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Tag(alloc::string::String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(t) => Ok(ThetaStar::At(t)),
            Raw::Tag(s) if s == LIMIT_TAG => Ok(ThetaStar::LimitAtInfinity),
            Raw::Tag(s) => Err(serde::de::Error::custom(alloc::format!(
                "expected a number or \"{LIMIT_TAG}\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub theta_star: ThetaStar,
    /// Best objective value found (at the bracket edge for a limit).
    pub value: f64,
    /// The `θ` at which `value` was evaluated.
    pub theta: f64,
}

/// Scan and refinement settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Search {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub grid_points: usize,
    pub rel_tol: f64,
}

impl Default for Search {
    fn default() -> Self {
        Self {
            theta_lo: 1.0 + 1e-6,
            theta_hi: 1e6,
            grid_points: 2048,
            rel_tol: 1e-10,
        }
    }
}

/// Optimises `objective` over the default bracket `(1 + 1e-6, 1e6]`.
pub fn optimize_theta<F: FnMut(f64) -> f64>(objective: F, mode: Mode) -> Result<Optimum> {
    optimize_theta_with(objective, mode, Search::default())
}

pub fn optimize_theta_with<F: FnMut(f64) -> f64>(mut objective: F, mode: Mode, search: Search) -> Result<Optimum> {
    let Search {
        theta_lo,
        theta_hi,
        grid_points: n,
        rel_tol,
    } = search;
    if !(theta_lo > 1.0 && theta_hi > theta_lo) || n < 3 {
        return Err(Error::invalid("search", "need 1 < theta_lo < theta_hi and >= 3 points"));
    }
    let mut eval = |t: f64| {
        let v = objective(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { theta: t })
        }
    };
    let (u_lo, u_hi) = (math::ln(theta_lo), math::ln(theta_hi));
    let step = (u_hi - u_lo) / (n - 1) as f64;
    let u_at = |i: usize| if i + 1 == n { u_hi } else { u_lo + step * i as f64 };

    let mut values = alloc::vec::Vec::with_capacity(n);
    let mut best = 0;
    for i in 0..n {
        let v = eval(math::exp(u_at(i)))?;
        if i > 0 && mode.better(v, values[best]) {
            best = i;
        }
        values.push(v);
    }

    if best == n - 1 {
        let tail = &values[n - n / 8..];
        let monotone = tail.windows(2).all(|w| !mode.better(w[0], w[1]));
        if monotone {
            return Ok(Optimum {
                theta_star: ThetaStar::LimitAtInfinity,
                value: values[n - 1],
                theta: theta_hi,
            });
        }
    }

    // golden-section search on the neighbouring cells, in ln θ
    let mut a = u_at(best.saturating_sub(1));
    let mut b = u_at((best + 1).min(n - 1));
    let g = 0.5 * (math::sqrt(5.0) - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = eval(math::exp(x1))?;
    let mut f2 = eval(math::exp(x2))?;
    // relative tolerance in θ is an absolute tolerance in ln θ
    while b - a > rel_tol {
        if mode.better(f1, f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = eval(math::exp(x1))?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = eval(math::exp(x2))?;
        }
    }
    let (mut u, mut v) = if mode.better(f1, f2) { (x1, f1) } else { (x2, f2) };
    if mode.better(values[best], v) {
        u = u_at(best);
        v = values[best];
    }
    let theta = math::exp(u);
    Ok(Optimum {
        theta_star: ThetaStar::At(theta),
        value: v,
        theta,
    })
}
