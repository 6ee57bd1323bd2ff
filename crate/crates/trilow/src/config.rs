//! TOML experiment configuration.
//!
//! ```toml
//! mode = "deficit"
//! n = 500
//! density = 0.5        # or m = 62375
//! eta = 0.1
//! delta = 0.0
//! alpha = 0.1          # or c_prime = ..., with alpha = c_prime * delta * sqrt(n)
//! lambda = 0.3
//! trials = 200
//! master_seed = 7
//! c_d = 1.0
//! output_path = "deficit.json"
//!
//! [grid]               # sweep only; empty lists keep the base value
//! n = [250, 500]
//! alpha = [0.05, 0.1]
//! eta = [0.1]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trilow_core::conditioning::DEFAULT_C_D;
use trilow_core::graph::pair_count;
use trilow_core::ProcessParams;

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sample,
    Verify,
    Sweep,
    Tail,
    Deficit,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub eta: Vec<f64>,
}

impl Grid {
    pub fn point_count(&self) -> usize {
        self.n.len().max(1) * self.alpha.len().max(1) * self.eta.len().max(1)
    }
}

fn default_c_d() -> f64 {
    DEFAULT_C_D
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    #[serde(default)]
    pub m: Option<usize>,
    /// `m = round(density * N)`; ignored when `m` is set.
    #[serde(default)]
    pub density: Option<f64>,
    pub eta: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub c_prime: Option<f64>,
    pub lambda: f64,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default = "default_c_d")]
    pub c_d: f64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Rayon threads; defaults to the rayon global pool.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Adds wall-clock `elapsed_ms` to trial rows, which breaks byte-identical
    /// reruns.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub grid: Option<Grid>,
}

impl ExperimentConfig {
    /// Minimal config with a fixed alpha; the rest at their defaults.
    #[allow(clippy::too_many_arguments)]
    pub fn new(mode: Mode, n: usize, m: usize, eta: f64, alpha: f64, lambda: f64, trials: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            mode,
            n,
            m: Some(m),
            density: None,
            eta,
            delta: 0.0,
            alpha: Some(alpha),
            c_prime: None,
            lambda,
            trials,
            master_seed,
            c_d: DEFAULT_C_D,
            output_path: None,
            workers: None,
            record_timing: false,
            grid: None,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn edges(&self) -> Result<usize> {
        let big_n = pair_count(self.n);
        match (self.m, self.density) {
            (Some(m), _) => Ok(m),
            (None, Some(d)) if (0.0..=1.0).contains(&d) => Ok((d * big_n as f64).round() as usize),
            (None, Some(d)) => Err(HarnessError::Config(format!("density {d} outside [0,1]"))),
            (None, None) => Err(HarnessError::Config("one of m or density is required".into())),
        }
    }

    pub fn alpha_value(&self) -> Result<f64> {
        match (self.alpha, self.c_prime) {
            (Some(a), None) => Ok(a),
            (None, Some(c)) => Ok(c * self.delta * (self.n as f64).sqrt()),
            _ => Err(HarnessError::Config("exactly one of alpha and c_prime must be given".into())),
        }
    }

    pub fn params(&self) -> Result<ProcessParams> {
        let m = self.edges()?;
        let p = match (self.alpha, self.c_prime) {
            (None, Some(c)) => ProcessParams::with_c_prime(self.n, m, self.eta, self.delta, self.lambda, c)?,
            _ => ProcessParams::new(self.n, m, self.eta, self.delta, self.lambda, self.alpha_value()?)?,
        };
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(HarnessError::Config("workers must be at least 1".into()));
        }
        if !(self.c_d > 0.0 && self.c_d.is_finite()) {
            return Err(HarnessError::Config(format!("c_d = {} must be positive", self.c_d)));
        }
        self.params()?;
        if self.mode == Mode::Sweep {
            match &self.grid {
                Some(g) if !(g.n.is_empty() && g.alpha.is_empty() && g.eta.is_empty()) => {}
                _ => return Err(HarnessError::Config("sweep needs a nonempty [grid]".into())),
            }
        }
        Ok(())
    }

    /// Density used when `n` varies across a grid: the base `m / N`.
    pub fn base_density(&self) -> Result<f64> {
        Ok(self.edges()? as f64 / pair_count(self.n) as f64)
    }

    /// Copy at one grid point. A changed `n` keeps the base density; a grid
    /// `alpha` replaces any `c_prime`.
    pub fn at_point(&self, n: usize, alpha: f64, eta: f64) -> Result<Self> {
        let mut c = self.clone();
        if n != self.n {
            c.m = Some((self.base_density()? * pair_count(n) as f64).round() as usize);
            c.density = None;
            c.n = n;
        }
        if self.grid.as_ref().is_some_and(|g| !g.alpha.is_empty()) {
            c.alpha = Some(alpha);
            c.c_prime = None;
        }
        c.eta = eta;
        c.grid = None;
        c.mode = Mode::Deficit;
        c.validate()?;
        Ok(c)
    }

    /// Grid points in row-major order `(n, alpha, eta)`, empty axes replaced
    /// by the base value.
    pub fn grid_points(&self) -> Result<Vec<(usize, f64, f64)>> {
        let grid = self.grid.clone().unwrap_or_default();
        let or_base = |v: &Vec<f64>, base: f64| if v.is_empty() { vec![base] } else { v.clone() };
        let ns = if grid.n.is_empty() { vec![self.n] } else { grid.n.clone() };
        let alphas = or_base(&grid.alpha, self.alpha_value()?);
        let etas = or_base(&grid.eta, self.eta);
        let mut out = Vec::with_capacity(grid.point_count());
        for &n in &ns {
            for &a in &alphas {
                for &e in &etas {
                    out.push((n, a, e));
                }
            }
        }
        Ok(out)
    }
}
