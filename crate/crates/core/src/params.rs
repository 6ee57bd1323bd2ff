//! Parameters of the two-phase edge process.

use crate::error::{param_err, Result};
use crate::graph::pair_count;
use crate::math;

/// Parameters of the conditioned two-phase process.
///
/// `m0 = floor((1 - eta) m)` edges are revealed first, the remaining
/// `m1 = m - m0` form the second phase. `alpha` is the bias of the second
/// phase towards `F-`; when built with [`ProcessParams::with_c_prime`] it is
/// tied to the deficit as `alpha = c' * delta * sqrt(n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessParams {
    pub n: usize,
    pub m: usize,
    pub eta: f64,
    pub delta: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub c_prime: Option<f64>,
}

impl ProcessParams {
    pub fn new(n: usize, m: usize, eta: f64, delta: f64, lambda: f64, alpha: f64) -> Result<Self> {
        let p = Self { n, m, eta, delta, lambda, alpha, c_prime: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_c_prime(n: usize, m: usize, eta: f64, delta: f64, lambda: f64, c_prime: f64) -> Result<Self> {
        if !(c_prime >= 0.0 && c_prime.is_finite()) {
            return Err(param_err!("c' must be a nonnegative finite number, got {c_prime}"));
        }
        let alpha = c_prime * delta * math::sqrt(n as f64);
        let p = Self { n, m, eta, delta, lambda, alpha, c_prime: Some(c_prime) };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let big_n = self.pairs() as f64;
        if self.n < 3 {
            return Err(param_err!("need n >= 3, got {}", self.n));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(param_err!("lambda must lie in (0,1), got {}", self.lambda));
        }
        let m = self.m as f64;
        if m < self.lambda * big_n || m > (1.0 - self.lambda) * big_n {
            return Err(param_err!(
                "m = {} outside [lambda N, (1 - lambda) N] = [{}, {}]",
                self.m,
                self.lambda * big_n,
                (1.0 - self.lambda) * big_n
            ));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(param_err!("eta must lie in [0,1), got {}", self.eta));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(param_err!("alpha must lie in [0,1], got {}", self.alpha));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(param_err!("delta must be a nonnegative number, got {}", self.delta));
        }
        Ok(())
    }

    /// `N = C(n, 2)`.
    pub fn pairs(&self) -> usize {
        pair_count(self.n)
    }

    /// First-phase edge count. The `1e-9` guards against `(1 - eta) m`
    /// landing a hair below an integer.
    pub fn m0(&self) -> usize {
        (math::floor((1.0 - self.eta) * self.m as f64 + 1e-9) as usize).min(self.m)
    }

    pub fn m1(&self) -> usize {
        self.m - self.m0()
    }

    pub fn p(&self) -> f64 {
        self.m as f64 / self.pairs() as f64
    }

    pub fn p0(&self) -> f64 {
        self.m0() as f64 / self.pairs() as f64
    }

    pub fn p1(&self) -> f64 {
        self.m1() as f64 / self.pairs() as f64
    }

    /// Probability that a given non-edge of `G0` lands in `G1`.
    pub fn r1(&self) -> f64 {
        self.m1() as f64 / (self.pairs() - self.m0()) as f64
    }

    /// `n^{-1/5}`.
    pub fn eps(&self) -> f64 {
        epsilon(self.n)
    }

    /// Number of second-phase edges that must fall in `F-` under `E(alpha)`.
    pub fn k_minus(&self) -> usize {
        k_minus(self.m1(), self.alpha)
    }
}

/// The closeness threshold `n^{-1/5}` used for `E0`.
pub fn epsilon(n: usize) -> f64 {
    math::powf(n as f64, -0.2)
}

/// `round_half_even((1 + alpha) m1 / 2)`.
pub fn k_minus(m1: usize, alpha: f64) -> usize {
    math::round_half_even((1.0 + alpha) * m1 as f64 / 2.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_counts() {
        let p = ProcessParams::new(100, 2475, 0.1, 0.01, 0.2, 0.1).unwrap();
        assert_eq!(p.pairs(), 4950);
        assert_eq!(p.m0(), 2227);
        assert_eq!(p.m0() + p.m1(), 2475);
        assert_eq!(k_minus(10, 0.0), 5);
        assert_eq!(k_minus(10, 1.0), 10);
        // 1.1 * 5 / 2 = 2.75 -> 3; 1.0 * 5 / 2 = 2.5 -> 2 (half-even)
        assert_eq!(k_minus(5, 0.1), 3);
        assert_eq!(k_minus(5, 0.0), 2);
    }

    #[test]
    fn floor_is_robust_to_representation() {
        let p = ProcessParams::new(10, 30, 0.1, 0.0, 0.1, 0.0).unwrap();
        assert_eq!(p.m0(), 27);
        let p = ProcessParams::new(10, 20, 0.0, 0.0, 0.1, 0.0).unwrap();
        assert_eq!(p.m1(), 0);
    }

    #[test]
    fn c_prime_coupling() {
        let p = ProcessParams::with_c_prime(400, 39900, 0.1, 0.005, 0.3, 2.0).unwrap();
        assert!((p.alpha - 2.0 * 0.005 * 20.0).abs() < 1e-12);
        assert_eq!(p.c_prime, Some(2.0));
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(ProcessParams::new(10, 1, 0.1, 0.0, 0.2, 0.1).is_err());
        assert!(ProcessParams::new(10, 20, 1.0, 0.0, 0.2, 0.1).is_err());
        assert!(ProcessParams::new(10, 20, 0.1, 0.0, 0.2, 1.5).is_err());
        assert!(ProcessParams::new(10, 20, 0.1, 0.0, 0.0, 0.1).is_err());
        assert!(ProcessParams::with_c_prime(100, 2475, 0.1, 0.5, 0.2, 1.0).is_err());
    }
}
