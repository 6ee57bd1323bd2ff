//! Seeded trial loop: one row per trial of the conditioned two-phase process.
//!
//! Trial `i` uses the seed `derive_seed(master_seed, i)` and splits it into
//! independent streams for `G0`, the conditioned `G1` and the audit sets of
//! the `E0` check, so a record depends only on `(config, trial_id)`.
//! Trials run in chunks on a rayon pool; rows are handed to the sink in id
//! order, so outputs do not depend on the worker count.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use trilow_core::accounting::{exact_class_expectations, synergy_sum_gap};
use trilow_core::conditioning::{check_quasirandom_with_split, sample_conditioned_g1};
use trilow_core::graph::count_triangles_by_class;
use trilow_core::sample::{derive_seed, sample_gnm};
use trilow_core::synergy::split_f;
use trilow_core::ProcessParams;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Sub-stream indices under a trial seed.
pub(crate) const STREAM_G0: u64 = 0;
pub(crate) const STREAM_G1: u64 = 1;
pub(crate) const STREAM_AUDIT: u64 = 2;
pub(crate) const STREAM_UNCONDITIONED: u64 = 3;

pub fn trial_seed(master: u64, trial_id: u64) -> u64 {
    derive_seed(master, trial_id)
}

/// One trial of the conditioned process. Columns appear in the CSV in field
/// order; `elapsed_ms` is empty unless `record_timing` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub seed: u64,
    pub e0_pass: bool,
    pub t30: u64,
    pub t21: u64,
    pub t12: u64,
    pub t03: u64,
    pub n_tri_total: u64,
    pub codeg_gap: f64,
    pub syn_gap: f64,
    /// Exact `E[class | E(alpha), G0]`.
    pub exp_t30: f64,
    pub exp_t21: f64,
    pub exp_t12: f64,
    pub exp_t03: f64,
    pub ks_max_distance: f64,
    pub elapsed_ms: Option<u64>,
}

pub const TRIAL_CSV_HEADER: [&str; 16] = [
    "trial_id",
    "seed",
    "e0_pass",
    "t30",
    "t21",
    "t12",
    "t03",
    "n_tri_total",
    "codeg_gap",
    "syn_gap",
    "exp_t30",
    "exp_t21",
    "exp_t12",
    "exp_t03",
    "ks_max_distance",
    "elapsed_ms",
];

pub fn run_trial(params: &ProcessParams, c_d: f64, master: u64, trial_id: u64, timing: bool) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = trial_seed(master, trial_id);
    let g0 = sample_gnm(params.n, params.m0(), derive_seed(seed, STREAM_G0))?;
    let split = split_f(&g0)?;
    let report = check_quasirandom_with_split(&g0, &split, c_d, derive_seed(seed, STREAM_AUDIT))?;
    let g1 = sample_conditioned_g1(&split, params.m1(), params.alpha, derive_seed(seed, STREAM_G1))?;
    let counts = count_triangles_by_class(&g0, &g1)?;
    let gaps = synergy_sum_gap(&g0, &split)?;
    let exp = exact_class_expectations(&g0, &split, params.m1(), params.alpha)?;
    Ok(TrialRecord {
        trial_id,
        seed,
        e0_pass: report.passes(),
        t30: counts.t30,
        t21: counts.t21,
        t12: counts.t12,
        t03: counts.t03,
        n_tri_total: counts.total(),
        codeg_gap: gaps.codeg_gap,
        syn_gap: gaps.syn_gap,
        exp_t30: exp.t30,
        exp_t21: exp.t21,
        exp_t12: exp.t12,
        exp_t03: exp.t03,
        ks_max_distance: report.p2_max_distance,
        elapsed_ms: timing.then(|| start.elapsed().as_millis() as u64),
    })
}

/// Runs `jobs` in order-preserving chunks on a pool of `workers` threads
/// (the global pool when `None`), handing results to `sink` in index order.
/// Stops at the first error, from a job or from the sink.
pub(crate) fn for_each_ordered<T, F, S>(count: u64, workers: Option<usize>, job: F, mut sink: S) -> Result<()>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
    S: FnMut(u64, T) -> Result<()>,
{
    let pool = match workers {
        None => None,
        Some(k) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?,
        ),
    };
    let threads = pool.as_ref().map_or_else(rayon::current_num_threads, |p| p.current_num_threads());
    let chunk = (threads as u64 * 4).max(1);
    let mut start = 0;
    while start < count {
        let end = (start + chunk).min(count);
        let compute = || (start..end).into_par_iter().map(&job).collect::<Vec<Result<T>>>();
        let results = match &pool {
            Some(p) => p.install(compute),
            None => compute(),
        };
        for (id, r) in (start..end).zip(results) {
            sink(id, r.map_err(|e| e.in_trial(id))?).map_err(|e| e.in_trial(id))?;
        }
        start = end;
    }
    Ok(())
}

/// Streams the configured trials to `sink` in id order.
pub fn run_trials<S>(config: &ExperimentConfig, mut sink: S) -> Result<()>
where
    S: FnMut(TrialRecord) -> Result<()>,
{
    config.validate()?;
    let params = config.params()?;
    let (c_d, master, timing) = (config.c_d, config.master_seed, config.record_timing);
    for_each_ordered(
        config.trials as u64,
        config.workers,
        |id| run_trial(&params, c_d, master, id, timing),
        |_, rec| sink(rec),
    )
}

/// Writes the trial table as CSV, flushing after every row so an interrupted
/// run leaves a valid prefix.
pub fn write_trials_csv<W: Write>(config: &ExperimentConfig, w: W) -> Result<u64> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let ctx = |e| HarnessError::csv("trial table", e);
    out.write_record(TRIAL_CSV_HEADER).map_err(ctx)?;
    out.flush().map_err(|e| HarnessError::io("<trial table>", e))?;
    let mut rows = 0;
    run_trials(config, |rec| {
        out.serialize(&rec).map_err(ctx)?;
        out.flush().map_err(|e| HarnessError::io("<trial table>", e))?;
        rows += 1;
        Ok(())
    })?;
    Ok(rows)
}
