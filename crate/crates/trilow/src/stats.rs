//! Small estimators shared by the experiments.

use rand::Rng;
use serde::Serialize;
use trilow_core::sample::rng_from_seed;

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceEstimate {
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    /// Standard error of `variance`, from the fourth central moment.
    pub se: f64,
    /// `p^2 (1-p)^2 (n-2)`.
    pub target: f64,
}

impl VarianceEstimate {
    pub fn z_score(&self) -> f64 {
        (self.variance - self.target) / self.se
    }
}

/// Synergy of a fixed non-adjacent pair `(u, w)` in `G(n, p)`.
///
/// Given that `uw` is not an edge, `S(u,w) = sum_x (1[ux] - p)(1[wx] - p)`
/// over the other `n - 2` vertices, so only the `2(n-2)` edges at `u` and
/// `w` are drawn for each sample.
pub fn pair_synergy_variance(n: usize, p: f64, samples: u64, seed: u64) -> VarianceEstimate {
    assert!(n >= 3 && (0.0..=1.0).contains(&p) && samples >= 2);
    let mut rng = rng_from_seed(seed);
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let (mut du, mut dw, mut codeg) = (0usize, 0usize, 0usize);
            for _ in 0..n - 2 {
                let a = rng.gen_bool(p);
                let b = rng.gen_bool(p);
                du += a as usize;
                dw += b as usize;
                codeg += (a && b) as usize;
            }
            trilow_core::synergy::synergy_from_counts(n, du, dw, codeg, p)
        })
        .collect();
    let m: Moments = values.iter().copied().collect();
    let (mean, var) = (m.mean(), m.variance());
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / samples as f64;
    VarianceEstimate {
        samples,
        mean,
        variance: var,
        se: ((m4 - var * var) / samples as f64).sqrt(),
        target: p * p * (1.0 - p) * (1.0 - p) * (n - 2) as f64,
    }
}
