//! Closed-form constants for the critical family `ℓ_n = c n^{-1/d}` and the
//! θ-optimised Hausdorff-dimension bounds built from them.

use crate::math;
use crate::optimize::{optimize_theta, Mode, ThetaStar};
use crate::{Error, Result};

fn check_c(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::domain("c", c, "(0, inf)"))
    }
}

fn check_d(d: u32) -> Result<()> {
    if d == 0 {
        Err(Error::invalid("d", "must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 1.0 {
        Ok(())
    } else {
        Err(Error::domain("theta", theta, "(1, inf)"))
    }
}

/// `x = (2c)^d (θ - 1) / θ²`, the exponent shared by `s(c, θ)` and `C_l`.
pub fn hit_exponent(c: f64, d: u32, theta: f64) -> f64 {
    math::powi(2.0 * c, d as i32) * (theta - 1.0) / (theta * theta)
}

/// `s(c, θ) = -d ln(1 - e^{-x}) / ln θ` with `x = (2c)^d (θ - 1) / θ²`.
pub fn s_exponent(c: f64, d: u32, theta: f64) -> Result<f64> {
    check_c(c)?;
    check_d(d)?;
    check_theta(theta)?;
    let x = hit_exponent(c, d, theta);
    let s = -(d as f64) * math::ln_one_minus_exp_neg(x) / math::ln(theta);
    Ok(s.max(0.0))
}

/// Entries `Θ`, `Δ` of the count-recursion matrix `[[1+Θ, Θ], [Δ, Δ]]` and
/// its top eigenvalue `Λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LambdaMatrix {
    pub theta_cap: f64,
    pub delta: f64,
    pub lambda: f64,
}

impl LambdaMatrix {
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 + self.theta_cap, self.theta_cap], [self.delta, self.delta]]
    }
}

pub fn lambda_matrix(c: f64, d: u32, theta: f64) -> Result<LambdaMatrix> {
    check_c(c)?;
    check_d(d)?;
    check_theta(theta)?;
    let df = d as f64;
    let di = d as i32;
    let a1 = math::powf(theta, -1.0 / df);
    let a2 = math::powf(theta, -2.0 / df);
    let theta_cap = (theta - 1.0) * math::powi(2.0 * c * (1.0 + a2), di);
    let delta = (theta - 1.0) * math::powi(2.0 * c, di) * (math::powi(1.0 + a1, di) - math::powi(1.0 + a2, di));
    let b = 0.5 * (1.0 + theta_cap + delta);
    let lambda = b + math::sqrt((b * b - delta).max(0.0));
    Ok(LambdaMatrix {
        theta_cap,
        delta,
        lambda,
    })
}

/// `I_s = d 2^s / (d - s)`, the s-energy of Lebesgue measure on the torus.
pub fn energy_constant(s: f64, d: u32) -> Result<f64> {
    check_d(d)?;
    let df = d as f64;
    if !(s > 0.0 && s < df) {
        return Err(Error::domain("s", s, "(0, d)"));
    }
    Ok(df * math::powf(2.0, s) / (df - s))
}

/// `½ (-θ² / (θ - 1) · ln(1 - 1/θ))^{1/d}`; decreases to 1/2 as `θ → ∞`.
pub fn critical_c(theta: f64, d: u32) -> Result<f64> {
    check_d(d)?;
    check_theta(theta)?;
    let inner = theta / (theta - 1.0) * (-theta * math::ln_1p(-1.0 / theta));
    Ok(0.5 * math::powf(inner, 1.0 / d as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    /// `c < 1/2`
    Subcritical,
    /// `c = 1/2`
    Critical,
    /// `c > 1/2`
    Supercritical,
}

impl Regime {
    pub fn of(c: f64) -> Self {
        if c < 0.5 {
            Regime::Subcritical
        } else if c == 0.5 {
            Regime::Critical
        } else {
            Regime::Supercritical
        }
    }
}

/// A dimension bound with the optimising `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimBound {
    pub value: f64,
    pub theta_star: ThetaStar,
}

/// `max(0, sup_θ (d - s(c, θ)))`.
pub fn lower_bound_dim(c: f64, d: u32) -> Result<DimBound> {
    check_c(c)?;
    check_d(d)?;
    let df = d as f64;
    let opt = optimize_theta(|t| df - s_exponent(c, d, t).unwrap_or(f64::NAN), Mode::Max)?;
    Ok(DimBound {
        value: opt.value.clamp(0.0, df),
        theta_star: opt.theta_star,
    })
}

/// `min(d, inf_θ d ln Λ(θ) / ln θ)`.
pub fn upper_bound_dim(c: f64, d: u32) -> Result<DimBound> {
    check_c(c)?;
    check_d(d)?;
    let df = d as f64;
    let opt = optimize_theta(
        |t| match lambda_matrix(c, d, t) {
            Ok(m) => df * math::ln(m.lambda) / math::ln(t),
            Err(_) => f64::NAN,
        },
        Mode::Min,
    )?;
    Ok(DimBound {
        value: opt.value.clamp(0.0, df),
        theta_star: opt.theta_star,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub c: f64,
    pub d: u32,
    pub lower_bound: f64,
    pub theta_star_lower: ThetaStar,
    pub upper_bound: f64,
    pub theta_star_upper: ThetaStar,
    /// `s(c, θ)` at the finite lower-bound optimiser.
    pub s_at_theta_star: Option<f64>,
    /// `Λ` at the finite upper-bound optimiser.
    pub lambda_at_theta_star: Option<f64>,
    pub regime: Regime,
}

pub fn bound_report(c: f64, d: u32) -> Result<BoundReport> {
    let lo = lower_bound_dim(c, d)?;
    let hi = upper_bound_dim(c, d)?;
    let s_at = match lo.theta_star {
        ThetaStar::At(t) => Some(s_exponent(c, d, t)?),
        ThetaStar::LimitAtInfinity => None,
    };
    let lambda_at = match hi.theta_star {
        ThetaStar::At(t) => Some(lambda_matrix(c, d, t)?.lambda),
        ThetaStar::LimitAtInfinity => None,
    };
    Ok(BoundReport {
        c,
        d,
        lower_bound: lo.value,
        theta_star_lower: lo.theta_star,
        upper_bound: hi.value,
        theta_star_upper: hi.theta_star,
        s_at_theta_star: s_at,
        lambda_at_theta_star: lambda_at,
        regime: Regime::of(c),
    })
}
