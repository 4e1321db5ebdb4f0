// Thin wrappers over libm so the rest of the crate reads like std code.

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}
#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn exp_m1(x: f64) -> f64 {
    libm::expm1(x)
}
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `ln(1 - e^{-x})` for `x > 0`, accurate at both small and large `x`.
pub fn ln_one_minus_exp_neg(x: f64) -> f64 {
    if x > core::f64::consts::LN_2 {
        ln_1p(-exp(-x))
    } else {
        ln(-exp_m1(-x))
    }
}

/// `(1 - p)^n` and `1 - (1 - p)^n` evaluated without cancellation.
/// `p` is clamped to `[0, 1]`.
pub fn miss_and_hit(p: f64, n: f64) -> (f64, f64) {
    let p = p.clamp(0.0, 1.0);
    if p >= 1.0 {
        return if n > 0.0 { (0.0, 1.0) } else { (1.0, 0.0) };
    }
    let log_miss = n * ln_1p(-p);
    (exp(log_miss), -exp_m1(log_miss))
}
