//! Radius schedules `ℓ = (ℓ_n)_{n ≥ 1}`.

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// The radius sequence driving a covering experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum RadiusSchedule {
    /// `ℓ_n = c · n^{-α}`.
    PowerLaw { c: f64, alpha: f64 },
    /// `ℓ_n = c · n^{-1/d}`.
    CriticalScale { c: f64, d: u32 },
    /// A finite nonincreasing prefix; carries no limit claim.
    Explicit { values: Vec<f64> },
}

impl RadiusSchedule {
    pub fn power_law(c: f64, alpha: f64) -> Result<Self> {
        check_positive("c", c)?;
        check_positive("alpha", alpha)?;
        Ok(Self::PowerLaw { c, alpha })
    }

    pub fn critical(c: f64, d: u32) -> Result<Self> {
        check_positive("c", c)?;
        if d == 0 {
            return Err(Error::invalid("d", "must be at least 1"));
        }
        Ok(Self::CriticalScale { c, d })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("values", "explicit schedule is empty"));
        }
        for &v in &values {
            check_positive("radius", v)?;
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid("values", "radii must be nonincreasing"));
        }
        Ok(Self::Explicit { values })
    }

    /// Re-checks the invariants; useful after deserialization.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::PowerLaw { c, alpha } => Self::power_law(*c, *alpha).map(drop),
            Self::CriticalScale { c, d } => Self::critical(*c, *d).map(drop),
            Self::Explicit { values } => Self::explicit(values.clone()).map(drop),
        }
    }

    /// Number of addressable terms; `None` for the infinite symbolic families.
    pub fn term_count(&self) -> Option<u64> {
        match self {
            Self::Explicit { values } => Some(values.len() as u64),
            _ => None,
        }
    }

    /// Power-law view `(c, α)` for the symbolic families.
    pub fn power_params(&self) -> Option<(f64, f64)> {
        match *self {
            Self::PowerLaw { c, alpha } => Some((c, alpha)),
            Self::CriticalScale { c, d } => Some((c, 1.0 / d as f64)),
            Self::Explicit { .. } => None,
        }
    }

    /// `ℓ_n` for `n ≥ 1`.
    pub fn radius_at(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::OutOfRange { index: 0, len: 0 });
        }
        match self {
            Self::PowerLaw { c, alpha } => Ok(c * math::powf(n as f64, -alpha)),
            Self::CriticalScale { c, d } => Ok(critical_radius(*c, *d, n)),
            Self::Explicit { values } => values.get((n - 1) as usize).copied().ok_or(Error::OutOfRange {
                index: n,
                len: values.len() as u64,
            }),
        }
    }
}

/// `c · n^{-1/d}`, exact for the common cases d = 1, 2.
pub fn critical_radius(c: f64, d: u32, n: u64) -> f64 {
    let n = n as f64;
    match d {
        1 => c / n,
        2 => c / math::sqrt(n),
        _ => c * math::powf(n, -1.0 / d as f64),
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(name, v, "(0, inf)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn power_law_value() {
        let s = RadiusSchedule::power_law(1.0, 0.5).unwrap();
        assert!((s.radius_at(4).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn critical_scale_value() {
        let s = RadiusSchedule::critical(0.3, 2).unwrap();
        assert!((s.radius_at(9).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn explicit_lookup_and_range() {
        let s = RadiusSchedule::explicit(vec![0.5, 0.25, 0.125]).unwrap();
        assert_eq!(s.radius_at(2).unwrap(), 0.25);
        assert_eq!(s.radius_at(4), Err(Error::OutOfRange { index: 4, len: 3 }));
        assert!(s.radius_at(0).is_err());
    }

    #[test]
    fn explicit_must_be_positive_and_nonincreasing() {
        assert!(RadiusSchedule::explicit(vec![0.5, 0.6]).is_err());
        assert!(RadiusSchedule::explicit(vec![0.5, 0.0]).is_err());
        assert!(RadiusSchedule::explicit(vec![]).is_err());
    }

    #[test]
    fn families_are_nonincreasing() {
        let fams = [
            RadiusSchedule::power_law(0.7, 0.3).unwrap(),
            RadiusSchedule::power_law(2.0, 3.0).unwrap(),
            RadiusSchedule::critical(1.0, 1).unwrap(),
            RadiusSchedule::critical(0.5, 3).unwrap(),
        ];
        for s in &fams {
            let mut prev = f64::INFINITY;
            for n in 1..5000u64 {
                let r = s.radius_at(n).unwrap();
                assert!(r > 0.0 && r <= prev, "{s:?} at {n}");
                prev = r;
            }
        }
    }
}
