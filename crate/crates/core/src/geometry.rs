//! Points of the d-torus `[0,1)^d` and the wrap-around max-norm distance.

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// A point of the d-torus. Every coordinate lies in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("coords", "dimension must be at least 1"));
        }
        for &x in &coords {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::domain("coordinate", x, "[0, 1)"));
            }
        }
        Ok(Self { coords })
    }

    /// Reduces arbitrary finite reals modulo 1.
    pub fn wrapped(coords: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(coords.into_iter().map(wrap_unit).collect())
    }

    pub fn origin(dim: usize) -> Result<Self> {
        Self::new(alloc::vec![0.0; dim])
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

/// `x mod 1` in `[0, 1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - math::floor(x);
    // x slightly below an integer can round up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Circle distance between two coordinates in `[0, 1)`; lies in `[0, 1/2]`.
#[inline]
pub fn axis_dist(a: f64, b: f64) -> f64 {
    let t = math::abs(a - b);
    if t > 0.5 {
        1.0 - t
    } else {
        t
    }
}

/// Max-norm torus distance between coordinate slices of equal length.
#[inline]
pub fn wrap_dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(0.0f64, |acc, (&a, &b)| acc.max(axis_dist(a, b)))
}

/// `‖x − y‖`: the max over axes of `min(|x_i − y_i|, 1 − |x_i − y_i|)`.
pub fn torus_dist(x: &TorusPoint, y: &TorusPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            actual: y.dim(),
        });
    }
    Ok(wrap_dist(&x.coords, &y.coords))
}

/// Norm of a torus point, i.e. its distance to the origin.
pub fn torus_norm(t: &[f64]) -> f64 {
    t.iter().fold(0.0f64, |acc, &a| acc.max(axis_dist(a, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(c: &[f64]) -> TorusPoint {
        TorusPoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn wraps_around() {
        let d = torus_dist(&p(&[0.1]), &p(&[0.9])).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
    }

    #[test]
    fn identity_is_zero() {
        let x = p(&[0.3, 0.7, 0.999]);
        assert_eq!(torus_dist(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn max_over_axes() {
        let d = torus_dist(&p(&[0.1, 0.2]), &p(&[0.4, 0.9])).unwrap();
        assert!((d - 0.3).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let err = torus_dist(&p(&[0.1]), &p(&[0.1, 0.2])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn rejects_coordinates_outside_unit_interval() {
        assert!(TorusPoint::new(vec![1.0]).is_err());
        assert!(TorusPoint::new(vec![-0.1]).is_err());
        assert!(TorusPoint::new(vec![]).is_err());
        let w = TorusPoint::wrapped([1.25, -0.25]).unwrap();
        assert_eq!(w.coords(), &[0.25, 0.75]);
    }

    #[test]
    fn wrap_unit_never_returns_one() {
        assert_eq!(wrap_unit(-1e-18), 0.0);
        assert!(wrap_unit(-1e-12) < 1.0);
    }
}
