//! Thin `no_std` float helpers over `libm`, plus log-binomials.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Round half to even.
#[inline]
pub(crate) fn round_half_even(x: f64) -> f64 {
    libm::rint(x)
}

/// `ln C(n, k)` via log-gamma; `-inf` when `k > n`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    let n = n as f64;
    let k = k as f64;
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// Exact `C(n, k)` as a float for the small arguments used by the accounting
/// formulas (`k <= 3`).
pub(crate) fn falling(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * n.saturating_sub(i) as f64)
}

pub(crate) fn choose_small(n: u64, k: u64) -> f64 {
    falling(n, k) / falling(k, k)
}
