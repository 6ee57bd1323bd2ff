//! Triangle deficit under `E(alpha)` and parameter sweeps.
//!
//! Each trial draws `G0`, splits it and checks `E0`. It then completes `G0`
//! twice: once with a uniform `m1`-subset of its non-edges (so the union is
//! uniform `G(n,m)`) and once with the conditioned sampler. The unconditioned
//! mean `mu_hat` uses every trial. On `E0`-passing trials the deficit is the
//! paired difference between the unconditioned triangle count and the exact
//! conditional expectation given `G0`; pairing cancels the `N(G0)` noise.

use std::io::Write;

use serde::{Deserialize, Serialize};
use trilow_core::accounting::{codegree_sum_gap, exact_class_expectations};
use trilow_core::conditioning::{check_quasirandom_with_split, sample_conditioned_g1};
use trilow_core::graph::count_triangles_by_class;
use trilow_core::sample::{derive_seed, rng_from_seed, sample_gnm, sample_subset};
use trilow_core::synergy::split_f;
use trilow_core::{Edge, Graph, ProcessParams};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::stats::Moments;
use crate::trials::{for_each_ordered, trial_seed, STREAM_AUDIT, STREAM_G0, STREAM_G1, STREAM_UNCONDITIONED};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeficitTrial {
    pub trial_id: u64,
    pub e0_pass: bool,
    /// `N(G0 ∪ G1)` with `G1` uniform among the non-edges.
    pub unconditioned: f64,
    /// `E[N | E(alpha), G0]`, on `E0`-passing trials.
    pub conditional_exact: Option<f64>,
    /// `N(G0 ∪ G1)` with `G1` drawn under `E(alpha)`, on `E0`-passing trials.
    pub conditioned: Option<f64>,
    pub codeg_gap: f64,
}

pub fn deficit_trial(params: &ProcessParams, c_d: f64, master: u64, trial_id: u64) -> Result<DeficitTrial> {
    let seed = trial_seed(master, trial_id);
    let g0 = sample_gnm(params.n, params.m0(), derive_seed(seed, STREAM_G0))?;
    let split = split_f(&g0)?;
    let report = check_quasirandom_with_split(&g0, &split, c_d, derive_seed(seed, STREAM_AUDIT))?;
    let non_edges: Vec<Edge> = g0.non_edges().collect();
    let mut rng = rng_from_seed(derive_seed(seed, STREAM_UNCONDITIONED));
    let g1u = Graph::from_edges(params.n, sample_subset(&non_edges, params.m1(), &mut rng)?)?;
    let unconditioned = count_triangles_by_class(&g0, &g1u)?.total() as f64;
    let codeg_gap = codegree_sum_gap(&g0, &split)?;
    let (conditional_exact, conditioned) = if report.passes() {
        let exact = exact_class_expectations(&g0, &split, params.m1(), params.alpha)?.total();
        let g1 = sample_conditioned_g1(&split, params.m1(), params.alpha, derive_seed(seed, STREAM_G1))?;
        (Some(exact), Some(count_triangles_by_class(&g0, &g1)?.total() as f64))
    } else {
        (None, None)
    };
    Ok(DeficitTrial { trial_id, e0_pass: report.passes(), unconditioned, conditional_exact, conditioned, codeg_gap })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// No trial passed `E0`.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeficitSummary {
    pub n: usize,
    pub m: usize,
    pub eta: f64,
    pub alpha: f64,
    pub trials: usize,
    pub e0_pass_count: usize,
    pub mu_hat: f64,
    pub mu_se: f64,
    /// Mean exact conditional expectation over `E0`-passing trials.
    pub cond_mean: f64,
    pub cond_se: f64,
    /// Mean of `unconditioned - conditional_exact` over `E0`-passing trials.
    pub deficit: f64,
    pub deficit_se: f64,
    pub z: f64,
    pub rel_deficit: f64,
    /// Half the relative deficit.
    pub delta_hat: f64,
    /// `(1 - delta_hat) mu_hat`.
    pub markov_threshold: f64,
    /// Fraction of conditioned draws below `markov_threshold`.
    pub markov_freq: f64,
    pub mean_codeg_gap: f64,
    pub mean_abs_codeg_gap: f64,
    pub status: Status,
}

impl DeficitSummary {
    /// At `alpha = 0` the deficit must vanish within 4 standard errors;
    /// otherwise it must be positive.
    pub fn passes(&self) -> bool {
        self.status == Status::Ok && if self.alpha == 0.0 { self.z.abs() <= 4.0 } else { self.deficit > 0.0 }
    }

    pub fn from_trials(params: &ProcessParams, trials: &[DeficitTrial]) -> Self {
        let mu: Moments = trials.iter().map(|t| t.unconditioned).collect();
        let passing: Vec<&DeficitTrial> = trials.iter().filter(|t| t.e0_pass).collect();
        let cond: Moments = passing.iter().filter_map(|t| t.conditional_exact).collect();
        let diff: Moments = passing.iter().filter_map(|t| t.conditional_exact.map(|e| t.unconditioned - e)).collect();
        let gaps: Moments = trials.iter().map(|t| t.codeg_gap).collect();
        let abs_gaps: Moments = trials.iter().map(|t| t.codeg_gap.abs()).collect();
        let mu_hat = mu.mean();
        let rel = diff.mean() / mu_hat;
        let delta_hat = rel / 2.0;
        let threshold = (1.0 - delta_hat) * mu_hat;
        let below = passing.iter().filter(|t| t.conditioned.is_some_and(|c| c < threshold)).count();
        DeficitSummary {
            n: params.n,
            m: params.m,
            eta: params.eta,
            alpha: params.alpha,
            trials: trials.len(),
            e0_pass_count: passing.len(),
            mu_hat,
            mu_se: mu.se(),
            cond_mean: cond.mean(),
            cond_se: cond.se(),
            deficit: diff.mean(),
            deficit_se: diff.se(),
            z: diff.mean() / diff.se(),
            rel_deficit: rel,
            delta_hat,
            markov_threshold: threshold,
            markov_freq: if passing.is_empty() { f64::NAN } else { below as f64 / passing.len() as f64 },
            mean_codeg_gap: gaps.mean(),
            mean_abs_codeg_gap: abs_gaps.mean(),
            status: if passing.is_empty() { Status::Inconclusive } else { Status::Ok },
        }
    }
}

pub fn deficit_trials(config: &ExperimentConfig) -> Result<Vec<DeficitTrial>> {
    config.validate()?;
    let params = config.params()?;
    let mut out = Vec::with_capacity(config.trials);
    for_each_ordered(
        config.trials as u64,
        config.workers,
        |id| deficit_trial(&params, config.c_d, config.master_seed, id),
        |_, t| {
            out.push(t);
            Ok(())
        },
    )?;
    Ok(out)
}

pub fn deficit_experiment(config: &ExperimentConfig) -> Result<DeficitSummary> {
    let trials = deficit_trials(config)?;
    Ok(DeficitSummary::from_trials(&config.params()?, &trials))
}

/// One sweep point. Failed points keep their coordinates, `status = "error"`
/// and the message; the numeric columns are then empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub eta: f64,
    pub alpha: f64,
    pub m: Option<usize>,
    pub trials: usize,
    pub e0_pass_count: Option<usize>,
    pub mu_hat: Option<f64>,
    pub cond_mean: Option<f64>,
    pub deficit: Option<f64>,
    pub deficit_se: Option<f64>,
    pub z: Option<f64>,
    pub rel_deficit: Option<f64>,
    pub markov_freq: Option<f64>,
    pub mean_abs_codeg_gap: Option<f64>,
    pub status: String,
    pub error: String,
}

pub const SWEEP_CSV_HEADER: [&str; 16] = [
    "n",
    "eta",
    "alpha",
    "m",
    "trials",
    "e0_pass_count",
    "mu_hat",
    "cond_mean",
    "deficit",
    "deficit_se",
    "z",
    "rel_deficit",
    "markov_freq",
    "mean_abs_codeg_gap",
    "status",
    "error",
];

impl SweepRow {
    fn from_summary(s: &DeficitSummary) -> Self {
        SweepRow {
            n: s.n,
            eta: s.eta,
            alpha: s.alpha,
            m: Some(s.m),
            trials: s.trials,
            e0_pass_count: Some(s.e0_pass_count),
            mu_hat: Some(s.mu_hat),
            cond_mean: Some(s.cond_mean),
            deficit: Some(s.deficit),
            deficit_se: Some(s.deficit_se),
            z: Some(s.z),
            rel_deficit: Some(s.rel_deficit),
            markov_freq: Some(s.markov_freq),
            mean_abs_codeg_gap: Some(s.mean_abs_codeg_gap),
            status: match s.status {
                Status::Ok => "ok",
                Status::Inconclusive => "inconclusive",
            }
            .into(),
            error: String::new(),
        }
    }

    fn failed(n: usize, alpha: f64, eta: f64, trials: usize, err: &HarnessError) -> Self {
        SweepRow {
            n,
            eta,
            alpha,
            m: None,
            trials,
            e0_pass_count: None,
            mu_hat: None,
            cond_mean: None,
            deficit: None,
            deficit_se: None,
            z: None,
            rel_deficit: None,
            markov_freq: None,
            mean_abs_codeg_gap: None,
            status: "error".into(),
            error: err.to_string(),
        }
    }
}

/// Evaluates every grid point, handing rows to `sink` as they finish.
pub fn sweep<S>(config: &ExperimentConfig, mut sink: S) -> Result<Vec<SweepRow>>
where
    S: FnMut(&SweepRow) -> Result<()>,
{
    let mut rows = Vec::new();
    for (n, alpha, eta) in config.grid_points()? {
        let row = match config.at_point(n, alpha, eta).and_then(|c| deficit_experiment(&c)) {
            Ok(s) => SweepRow::from_summary(&s),
            Err(e) => SweepRow::failed(n, alpha, eta, config.trials, &e),
        };
        sink(&row)?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(config: &ExperimentConfig, w: W) -> Result<Vec<SweepRow>> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let ctx = |e| HarnessError::csv("sweep table", e);
    out.write_record(SWEEP_CSV_HEADER).map_err(ctx)?;
    out.flush().map_err(|e| HarnessError::io("<sweep table>", e))?;
    sweep(config, |row| {
        out.serialize(row).map_err(ctx)?;
        out.flush().map_err(|e| HarnessError::io("<sweep table>", e))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Grid, Mode};

    #[test]
    fn summary_of_hand_trials() {
        let params = ProcessParams::new(10, 20, 0.5, 0.0, 0.3, 0.1).unwrap();
        let t = |id, pass, unc, exact: Option<f64>, cond: Option<f64>| DeficitTrial {
            trial_id: id,
            e0_pass: pass,
            unconditioned: unc,
            conditional_exact: exact,
            conditioned: cond,
            codeg_gap: -1.0,
        };
        let trials = [
            t(0, true, 10.0, Some(8.0), Some(7.0)),
            t(1, true, 12.0, Some(9.0), Some(12.0)),
            t(2, false, 14.0, None, None),
        ];
        let s = DeficitSummary::from_trials(&params, &trials);
        assert_eq!(s.e0_pass_count, 2);
        assert_eq!(s.mu_hat, 12.0);
        assert_eq!(s.cond_mean, 8.5);
        assert_eq!(s.deficit, 2.5);
        assert!((s.deficit_se - 0.5).abs() < 1e-12);
        assert!((s.delta_hat - 2.5 / 24.0).abs() < 1e-12);
        // threshold (1 - 5/48) 12 = 10.75: one of the two conditioned draws.
        assert_eq!(s.markov_freq, 0.5);
        assert_eq!(s.status, Status::Ok);
        assert!(s.passes());

        let none = DeficitSummary::from_trials(&params, &trials[2..]);
        assert_eq!(none.status, Status::Inconclusive);
        assert!(!none.passes());
    }

    #[test]
    fn failed_grid_points_are_recorded() {
        let mut cfg = ExperimentConfig::new(Mode::Sweep, 30, 217, 0.2, 0.1, 0.3, 2, 4);
        // alpha = 2 is rejected by the parameter checks.
        cfg.grid = Some(Grid { n: vec![], alpha: vec![0.1, 2.0], eta: vec![] });
        let rows = sweep(&cfg, |_| Ok(())).unwrap();
        assert_eq!(rows.len(), 2);
        assert_ne!(rows[0].status, "error");
        assert_eq!(rows[1].status, "error");
        assert!(!rows[1].error.is_empty());
    }
}
