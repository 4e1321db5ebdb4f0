//! Sampling measures `μ` on the d-torus.

use crate::geometry::{axis_dist, TorusPoint};
use crate::math;
use crate::{Error, Result};

/// Distribution of each `ω_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum MeasureModel {
    /// Lebesgue measure on `T^d`.
    UniformTorus { d: usize },
    /// Uniform on the sub-torus where coordinates `support_dim..d` are zero.
    UniformSubtorus { support_dim: usize, d: usize },
}

impl MeasureModel {
    pub fn uniform(d: usize) -> Result<Self> {
        let m = Self::UniformTorus { d };
        m.validate()?;
        Ok(m)
    }

    pub fn subtorus(support_dim: usize, d: usize) -> Result<Self> {
        let m = Self::UniformSubtorus { support_dim, d };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::UniformTorus { d } if d >= 1 => Ok(()),
            Self::UniformTorus { .. } => Err(Error::invalid("d", "must be at least 1")),
            Self::UniformSubtorus { support_dim, d } if support_dim >= 1 && support_dim < d => Ok(()),
            Self::UniformSubtorus { .. } => Err(Error::Unsupported(
                "sub-torus support dimension must satisfy 1 <= k < d".into(),
            )),
        }
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        match *self {
            Self::UniformTorus { d } | Self::UniformSubtorus { d, .. } => d,
        }
    }

    /// Dimension `k` of the support (the local dimension at support points).
    pub fn support_dim(&self) -> usize {
        match *self {
            Self::UniformTorus { d } => d,
            Self::UniformSubtorus { support_dim, .. } => support_dim,
        }
    }

    /// Mass of a ball centred on the support: `min(1, (2r)^k)`.
    pub fn support_ball_mass(&self, r: f64) -> f64 {
        let k = self.support_dim();
        math::powi(2.0 * r, k as i32).min(1.0)
    }

    /// `μ(B(y, r))` for the open max-norm ball.
    pub fn ball_mass(&self, y: &TorusPoint, r: f64) -> Result<f64> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: y.dim(),
            });
        }
        if !(r >= 0.0) {
            return Err(Error::domain("r", r, "[0, inf)"));
        }
        let k = self.support_dim();
        let off_support = y.coords()[k..].iter().any(|&c| axis_dist(c, 0.0) >= r);
        if off_support {
            return Ok(0.0);
        }
        Ok(self.support_ball_mass(r))
    }

    /// Whether `μ(B(y, r))` is independent of `y` on the support.
    pub fn is_homogeneous(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn interval_mass() {
        let m = MeasureModel::uniform(1).unwrap();
        let y = TorusPoint::new(vec![0.3]).unwrap();
        assert_eq!(m.ball_mass(&y, 0.25).unwrap(), 0.5);
    }

    #[test]
    fn whole_torus_caps_at_one() {
        let m = MeasureModel::uniform(2).unwrap();
        let y = TorusPoint::new(vec![0.3, 0.4]).unwrap();
        assert_eq!(m.ball_mass(&y, 0.5).unwrap(), 1.0);
        assert_eq!(m.ball_mass(&y, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn subtorus_on_and_off_support() {
        let m = MeasureModel::subtorus(1, 2).unwrap();
        let on = TorusPoint::new(vec![0.7, 0.0]).unwrap();
        assert!((m.ball_mass(&on, 0.1).unwrap() - 0.2).abs() < 1e-15);
        let off = TorusPoint::new(vec![0.7, 0.2]).unwrap();
        assert_eq!(m.ball_mass(&off, 0.1).unwrap(), 0.0);
        assert!((m.ball_mass(&off, 0.3).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn negative_radius_is_rejected() {
        let m = MeasureModel::uniform(1).unwrap();
        let y = TorusPoint::new(vec![0.3]).unwrap();
        assert!(m.ball_mass(&y, -0.1).is_err());
    }

    #[test]
    fn subtorus_validation() {
        assert!(MeasureModel::subtorus(2, 2).is_err());
        assert!(MeasureModel::subtorus(0, 2).is_err());
        assert!(MeasureModel::uniform(0).is_err());
    }
}
