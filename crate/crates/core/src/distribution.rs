//! Kolmogorov distance to the standard normal law and the concentration
//! tools built on it.
//!
//! For a vector `x` of length `k`, `F_x(t)` is the fraction of entries at most
//! `t`, `d_t(x) = |F_x(t) - Phi(t)|` and `d(x) = sup_t d_t(x)`. The vector is
//! `eps`-far from normal when `d(x) > eps` and `eps`-close otherwise.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{param_err, Error, Result};
use crate::graph::Graph;
use crate::math;
use crate::sample::rng_from_seed;
use crate::synergy;

/// `Phi(t)` through the complementary error function. libm's `erfc` is
/// accurate to about one ulp, so the absolute error is far below `1e-12`.
pub fn std_normal_cdf(t: f64) -> f64 {
    0.5 * libm::erfc(-t / core::f64::consts::SQRT_2)
}

/// Inverse of [`std_normal_cdf`]: bisection to bracket the root, then a few
/// Newton steps.
pub fn std_normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(param_err!("quantile level {q} outside (0,1)"));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if std_normal_cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..3 {
        let density = math::exp(-0.5 * t * t) / math::sqrt(2.0 * core::f64::consts::PI);
        if density <= 0.0 {
            break;
        }
        let step = (std_normal_cdf(t) - q) / density;
        if !step.is_finite() {
            break;
        }
        t -= step;
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Close,
    Far,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Close => "close",
            Verdict::Far => "far",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsReport {
    pub distance: f64,
    /// Sample point at which the supremum is attained.
    pub argmax_t: f64,
    pub n_points: usize,
    pub eps: f64,
    pub verdict: Verdict,
}

fn sorted_copy(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(param_err!("empty vector"));
    }
    if x.iter().any(|v| v.is_nan()) {
        return Err(param_err!("vector contains NaN"));
    }
    let mut s = x.to_vec();
    s.sort_unstable_by(f64::total_cmp);
    Ok(s)
}

fn ks_sorted(sorted: &[f64]) -> (f64, f64) {
    let k = sorted.len() as f64;
    let mut best = (-1.0, sorted[0]);
    for (i, &v) in sorted.iter().enumerate() {
        let phi = std_normal_cdf(v);
        let above = ((i + 1) as f64 / k - phi).abs();
        let below = (i as f64 / k - phi).abs();
        let d = above.max(below);
        if d > best.0 {
            best = (d, v);
        }
    }
    best
}

/// Exact `d(x, Phi)`. The supremum of a step function against a continuous
/// cdf is attained at a jump, so only the sorted sample points are visited.
pub fn ks_distance_to_normal(x: &[f64], eps: f64) -> Result<KsReport> {
    let sorted = sorted_copy(x)?;
    let (distance, argmax_t) = ks_sorted(&sorted);
    let verdict = if distance <= eps { Verdict::Close } else { Verdict::Far };
    Ok(KsReport { distance, argmax_t, n_points: x.len(), eps, verdict })
}

/// `d_t(x, Phi)` at a single point.
pub fn ks_at(x: &[f64], t: f64) -> Result<f64> {
    let sorted = sorted_copy(x)?;
    Ok(ks_at_sorted(&sorted, t))
}

fn ks_at_sorted(sorted: &[f64], t: f64) -> f64 {
    let below = sorted.partition_point(|&v| v <= t);
    (below as f64 / sorted.len() as f64 - std_normal_cdf(t)).abs()
}

/// `max_j d_{t_j}(x) + eps` over the net `t_j = Phi^{-1}(j eps)`,
/// `j = 1..floor(1/eps)`. A net point with `j eps >= 1` sits at `+inf`, where
/// `d` is taken to be 0.
pub fn epsnet_bound(x: &[f64], eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(param_err!("eps = {eps} outside (0, 1/2)"));
    }
    let sorted = sorted_copy(x)?;
    let steps = math::floor(1.0 / eps) as usize;
    let mut best = 0.0f64;
    for j in 1..=steps {
        let level = j as f64 * eps;
        if level >= 1.0 {
            continue;
        }
        let t = std_normal_quantile(level)?;
        best = best.max(ks_at_sorted(&sorted, t));
    }
    Ok(best + eps)
}

fn weight_moments(a: &[f64]) -> Result<(f64, f64, f64)> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(param_err!("weights must be finite"));
    }
    let max = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Err(param_err!("all weights are zero"));
    }
    let sum: f64 = a.iter().sum();
    let sq: f64 = a.iter().map(|v| v * v).sum();
    Ok((max, sum, sq))
}

/// `2 max|a_i| / sqrt(p(1-p) sum a_i^2)`: a Kolmogorov-distance bound for the
/// normalised sum `sum a_i xi_i` of independent Bernoulli(`p`) variables.
pub fn berry_esseen_bound(a: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(param_err!("p = {p} outside (0,1)"));
    }
    let (max, _, sq) = weight_moments(a)?;
    Ok(2.0 * max / math::sqrt(p * (1.0 - p) * sq))
}

/// `min(1, (2/eps) exp(-eps^2 k / 2))`: the chance that `k` iid entries, each
/// `eps`-close to normal, form a `3 eps`-far vector.
pub fn iid_far_probability_bound(eps: f64, k: usize) -> f64 {
    if !(eps > 0.0) || k == 0 {
        return 1.0;
    }
    (2.0 / eps * math::exp(-eps * eps * k as f64 / 2.0)).min(1.0)
}

/// `k` independent copies of `(sum_i a_i xi_i - mu) / sigma`, with all the
/// `xi` independent Bernoulli(`p`).
pub fn weighted_bernoulli_vector(a: &[f64], p: f64, k: usize, seed: u64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(param_err!("p = {p} outside [0,1]"));
    }
    let (_, sum, sq) = weight_moments(a)?;
    let sigma = math::sqrt(p * (1.0 - p) * sq);
    if sigma == 0.0 {
        return Err(Error::Degenerate(alloc::format!("sigma vanishes at p = {p}")));
    }
    let mu = p * sum;
    let mut rng = rng_from_seed(seed);
    Ok((0..k)
        .map(|_| {
            let s: f64 = a.iter().filter(|_| rng.gen_bool(p)).sum();
            (s - mu) / sigma
        })
        .collect())
}

/// Fraction of `trials` uniform `k`-subsets of `x` that are `eps`-far from
/// normal. Requires `x` to be `2 eps`-far and `eps^2 k >= 2`, under which the
/// expected fraction is at least 1/2.
pub fn subsample_preservation_check(x: &[f64], eps: f64, k: usize, trials: usize, seed: u64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(param_err!("eps = {eps} must be positive"));
    }
    if k == 0 || k > x.len() {
        return Err(param_err!("subset size {k} outside 1..={}", x.len()));
    }
    if eps * eps * (k as f64) < 2.0 - 1e-12 {
        return Err(param_err!("eps^2 k = {} < 2", eps * eps * k as f64));
    }
    if trials == 0 {
        return Err(param_err!("need at least one trial"));
    }
    let whole = ks_distance_to_normal(x, eps)?;
    if whole.distance < 2.0 * eps {
        return Err(param_err!("x is only {}-far, need 2 eps = {}", whole.distance, 2.0 * eps));
    }
    let mut rng = rng_from_seed(seed);
    let mut far = 0usize;
    for _ in 0..trials {
        let sub = crate::sample::sample_subset(x, k, &mut rng)?;
        if ks_distance_to_normal(&sub, eps)?.verdict == Verdict::Far {
            far += 1;
        }
    }
    Ok(far as f64 / trials as f64)
}

/// KS report of the normalised synergy vector of every vertex of `g` at
/// density `p` (default `e(G)/N`). Vertices without non-neighbours get `None`.
pub fn vertex_ks_reports(g: &Graph, eps: f64, p: Option<f64>) -> Result<Vec<(usize, Option<KsReport>)>> {
    let p = match p {
        Some(p) => p,
        None => g.density(),
    };
    let sigma = synergy::sigma_p(g.n(), p)?;
    if sigma == 0.0 {
        return Err(Error::Degenerate(alloc::format!("sigma_p vanishes at p = {p}")));
    }
    let degrees = g.degrees();
    (0..g.n())
        .map(|u| {
            let values = synergy::normalized_with_degrees(g, &degrees, u, p, sigma);
            if values.is_empty() {
                Ok((u, None))
            } else {
                Ok((u, Some(ks_distance_to_normal(&values, eps)?)))
            }
        })
        .collect()
}
