//! Two-tier lemma verification.
//!
//! The exhaustive tier draws small instances (`n <= 12`) and compares every
//! exact identity against brute-force triple enumeration with zero tolerance
//! on integer quantities. Identities that are evaluated in floating point
//! (the relative synergy difference and the transfer algebra) use a relative
//! tolerance of `1e-9`.
//!
//! The statistical tier runs `config.trials` draws of `G0` at the configured
//! size and holds each asymptotic statement to a banded bound, on the trials
//! that pass `E0`.

use std::io::Write;

use rand::Rng;
use serde::Serialize;
use trilow_core::accounting::{
    all_neighborhood_edge_counts, exact_class_expectations, f_minus_degree_profile, f_plus_zero_sums,
    goodman_monochromatic, synergy_sum_gap, t_class_profile, transfer_identity_rhs, SplitGraphs,
};
use trilow_core::conditioning::{check_quasirandom_with_split, e_alpha_cost_check, sample_conditioned_g1};
use trilow_core::graph::{count_triangles, count_triangles_by_class, pair_count};
use trilow_core::sample::{derive_seed, rng_from_seed, sample_gnm, sample_subset};
use trilow_core::synergy::{relative_synergy, split_f, synergy};
use trilow_core::{Edge, FSplit, Graph, VertexSet};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::formats::{edge_list_string, write_split};
use crate::trials::{for_each_ordered, trial_seed, STREAM_AUDIT, STREAM_G0, STREAM_G1, STREAM_UNCONDITIONED};

pub const EXHAUSTIVE_INSTANCES: usize = 1000;
pub const EXHAUSTIVE_MAX_N: usize = 12;
/// Tolerance for identities evaluated in floating point, relative to the
/// magnitude of the terms.
pub const FLOAT_IDENTITY_TOL: f64 = 1e-9;
/// `|residual(a2)| / n^{13/5}`.
pub const A2_BAND: f64 = 5.0;
/// `|sum_u (e-(u) - e+(u))| / n^{5/2}`.
pub const MMP_BAND: f64 = 1.0;
/// `max_u |e-(u) + e+(u) - e±(u) - p0((a-b)^2 - (a+b))/2| / n^{3/2}` with
/// `a = |N_F-(u)|`, `b = |N_F+(u)|`. Three `n^{3/2}` errors from P5/P6.
pub const MPP_BAND: f64 = 3.0;
pub const E0_RATE_BOUND: f64 = 0.999;
pub const SIGN_RATE_BOUND: f64 = 0.99;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub lemma_id: String,
    pub n: usize,
    pub m: usize,
    pub eta: f64,
    pub alpha: f64,
    pub statistic: f64,
    pub bound: f64,
    pub pass: bool,
    /// Exact identities fail the run with exit code 3, bands with 2.
    #[serde(skip)]
    pub exact: bool,
}

pub const VERIFY_CSV_HEADER: [&str; 8] = ["lemma_id", "n", "m", "eta", "alpha", "statistic", "bound", "pass"];

/// A failing instance, serialised for replay.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceDump {
    pub lemma_id: String,
    pub seed: u64,
    /// `G0` as an edge list.
    pub graph: String,
    pub split: Option<String>,
    /// Extra edge list (the red colour class or `G1`), when the check uses one.
    pub extra: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
    pub dumps: Vec<InstanceDump>,
}

impl VerifyReport {
    pub fn exact_ok(&self) -> bool {
        self.rows.iter().filter(|r| r.exact).all(|r| r.pass)
    }

    pub fn statistical_ok(&self) -> bool {
        self.rows.iter().filter(|r| !r.exact).all(|r| r.pass)
    }

    /// 0 when everything passes, 3 on an exact failure, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if !self.exact_ok() {
            3
        } else if !self.statistical_ok() {
            2
        } else {
            0
        }
    }

    pub fn row(&self, lemma_id: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.lemma_id == lemma_id)
    }

    fn extend(&mut self, other: VerifyReport) {
        self.rows.extend(other.rows);
        self.dumps.extend(other.dumps);
    }
}

pub fn write_verify_csv<W: Write>(w: W, report: &VerifyReport) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let ctx = |e| HarnessError::csv("verify table", e);
    out.write_record(VERIFY_CSV_HEADER).map_err(ctx)?;
    for row in &report.rows {
        out.serialize(row).map_err(ctx)?;
    }
    out.flush().map_err(|e| HarnessError::io("<verify table>", e))
}

fn split_string(split: &FSplit) -> String {
    let mut buf = Vec::new();
    write_split(&mut buf, split).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("split files are ASCII")
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= FLOAT_IDENTITY_TOL * (1.0 + scale)
}

/// Failure tally of one identity across instances.
#[derive(Default)]
struct Tally {
    checked: usize,
    failures: usize,
    dump: Option<InstanceDump>,
}

#[derive(Default)]
struct Tallies(Vec<(&'static str, Tally)>);

impl Tallies {
    fn record(&mut self, id: &'static str, ok: bool, dump: impl FnOnce() -> InstanceDump) {
        let pos = match self.0.iter().position(|(k, _)| *k == id) {
            Some(i) => i,
            None => {
                self.0.push((id, Tally::default()));
                self.0.len() - 1
            }
        };
        let t = &mut self.0[pos].1;
        t.checked += 1;
        if !ok {
            t.failures += 1;
            if t.dump.is_none() {
                t.dump = Some(dump());
            }
        }
    }

    fn into_report(self, n: usize, m: usize, eta: f64, alpha: f64) -> VerifyReport {
        let mut rep = VerifyReport::default();
        for (id, t) in self.0 {
            rep.rows.push(CheckRow {
                lemma_id: id.to_string(),
                n,
                m,
                eta,
                alpha,
                statistic: t.failures as f64,
                bound: 0.0,
                pass: t.failures == 0,
                exact: true,
            });
            rep.dumps.extend(t.dump);
        }
        rep
    }
}

/// Triangles of the complete graph on `n` vertices whose three sides are
/// all in `host`, grouped by how many sides are in `marked`.
fn brute_classes(n: usize, host: impl Fn(usize, usize) -> bool, marked: impl Fn(usize, usize) -> bool) -> [u64; 4] {
    let mut out = [0u64; 4];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if host(a, b) && host(a, c) && host(b, c) {
                    let k = marked(a, b) as usize + marked(a, c) as usize + marked(b, c) as usize;
                    out[k] += 1;
                }
            }
        }
    }
    out
}

fn exhaustive_instance(seed: u64, tallies: &mut Tallies) -> Result<()> {
    let mut rng = rng_from_seed(seed);
    let n = rng.gen_range(3..=EXHAUSTIVE_MAX_N);
    let big_n = pair_count(n);
    // The split needs at least two non-edges.
    let g0 = sample_gnm(n, rng.gen_range(0..=big_n - 2), derive_seed(seed, STREAM_G0))?;
    let split = split_f(&g0)?;
    let minus = split.minus_graph();
    let dump = |id: &str, extra: Option<&Graph>| InstanceDump {
        lemma_id: id.to_string(),
        seed,
        graph: edge_list_string(&g0),
        split: Some(split_string(&split)),
        extra: extra.map(edge_list_string),
    };

    // Goodman on G0 with a random red/blue colouring.
    let red_edges: Vec<Edge> = g0.edges().filter(|_| rng.gen_bool(0.5)).collect();
    let red = Graph::from_edges(n, red_edges)?;
    let brute = brute_classes(n, |a, b| g0.has_edge(a, b), |a, b| red.has_edge(a, b));
    let ok = goodman_monochromatic(&g0, &red).is_ok_and(|gm| gm.holds() && gm.n_mc == brute[0] + brute[3]);
    tallies.record("goodman", ok, || dump("goodman", Some(&red)));

    // T-partition of the complement triangles by F- edges.
    let comp = g0.complement();
    let t = brute_classes(n, |a, b| comp.has_edge(a, b), |a, b| minus.has_edge(a, b));
    match t_class_profile(&g0, &split) {
        Ok(prof) => {
            let same = [prof.t0, prof.t1, prof.t2, prof.t3] == t;
            tallies.record("t_partition", same && prof.partition_ok(), || dump("t_partition", None));
            let n_mc = (t[0] + t[3]) as i64;
            let tomono = prof.tomono_ok() && prof.a2_lhs == 4 * n_mc - (t.iter().sum::<u64>() as i64);
            tallies.record("tomono", tomono && prof.monochromatic_ok(), || dump("tomono", None));
            tallies.record("eq_a_cauchy_schwarz", prof.cauchy_schwarz_ok(), || dump("eq_a_cauchy_schwarz", None));
        }
        Err(_) => {
            for id in ["t_partition", "tomono", "eq_a_cauchy_schwarz"] {
                tallies.record(id, false, || dump(id, None));
            }
        }
    }

    // Class counts of G0 ∪ G1 for a uniform G1 among the non-edges.
    let non_edges: Vec<Edge> = g0.non_edges().collect();
    let k = rng.gen_range(0..=non_edges.len());
    let g1 = Graph::from_edges(n, sample_subset(&non_edges, k, &mut rng)?)?;
    let union = g0.disjoint_union(&g1)?;
    let by_g1 = brute_classes(n, |a, b| union.has_edge(a, b), |a, b| g1.has_edge(a, b));
    let ok = count_triangles_by_class(&g0, &g1)
        .is_ok_and(|c| [c.t30, c.t21, c.t12, c.t03] == by_g1 && c.total() == count_triangles(&union));
    tallies.record("class_sum", ok, || dump("class_sum", Some(&g1)));

    // Handshake: sum_u D-(u) = |F-| - |F+|, doubled to stay in integers.
    let lhs: i64 = (0..n).map(|u| 2 * minus.degree(u) as i64 - (n - g0.degree(u) - 1) as i64).sum();
    let rhs = 2 * (split.f_minus.len() as i64 - split.f_plus.len() as i64);
    let even_ok = (big_n - g0.m()) % 2 == 1 || lhs == 0;
    tallies.record("handshake", lhs == rhs && even_ok, || dump("handshake", None));

    // Claim II on a random probe set of non-neighbours of a random vertex.
    let u = rng.gen_range(0..n);
    let nn: Vec<usize> = g0.non_neighborhood(u).iter().collect();
    if !nn.is_empty() {
        let size = rng.gen_range(1..=nn.len());
        let chosen = sample_subset(&nn, size, &mut rng)?;
        let probe = VertexSet::from_vertices(n, chosen.iter().copied())?;
        let p = g0.density();
        let mut ok = true;
        for &w in &chosen {
            let lhs = synergy(&g0, u, w, Some(p))? - relative_synergy(&g0, u, w, &probe, p)?;
            let rhs = p * p * (size as f64 - 1.0) - p * g0.degree_into(w, &probe) as f64;
            ok &= close(lhs, rhs, n as f64);
        }
        tallies.record("claim2_relative_synergy", ok, || dump("claim2_relative_synergy", None));
    }

    // Transfer algebra: codeg_gap - syn_gap in closed form.
    let gaps = synergy_sum_gap(&g0, &split)?;
    let closed = transfer_identity_rhs(&g0, &split)?;
    let ok = close(gaps.codeg_gap - gaps.syn_gap, closed, gaps.codeg_gap.abs() + gaps.syn_gap.abs());
    tallies.record("lemma4.2_transfer_algebra", ok, || dump("lemma4.2_transfer_algebra", None));
    Ok(())
}

/// Exact identities on `instances` random small instances.
pub fn exhaustive_tier(master_seed: u64, instances: usize) -> Result<VerifyReport> {
    let mut tallies = Tallies::default();
    for i in 0..instances as u64 {
        exhaustive_instance(derive_seed(master_seed ^ 0x5EED_0E4A_0571_7E11, i), &mut tallies)
            .map_err(|e| e.in_trial(i))?;
    }
    Ok(tallies.into_report(EXHAUSTIVE_MAX_N, 0, 0.0, 0.0))
}

/// Per-trial statistics of the statistical tier.
#[derive(Clone, Debug)]
struct StatTrial {
    seed: u64,
    e0_pass: bool,
    codeg_gap: f64,
    transfer_ratio: f64,
    degree_violations: usize,
    swap_ok: bool,
    mass_ok: bool,
    cs_ok: bool,
    tomono_ok: bool,
    partition_ok: bool,
    a2_residual: f64,
    mmp_sum: f64,
    mpp_max: f64,
    unconditioned: f64,
    conditional_exact: f64,
    conditioned: f64,
}

fn stat_trial(config: &ExperimentConfig, trial_id: u64) -> Result<StatTrial> {
    let params = config.params()?;
    let seed = trial_seed(config.master_seed, trial_id);
    let g0 = sample_gnm(params.n, params.m0(), derive_seed(seed, STREAM_G0))?;
    let split = split_f(&g0)?;
    let report = check_quasirandom_with_split(&g0, &split, config.c_d, derive_seed(seed, STREAM_AUDIT))?;
    let gaps = synergy_sum_gap(&g0, &split)?;
    let degrees = f_minus_degree_profile(&g0, &split)?;
    let fpz = f_plus_zero_sums(&g0, &split)?;
    let prof = t_class_profile(&g0, &split)?;
    let sides = SplitGraphs::new(&g0, &split)?;
    let p0 = g0.density();
    let mut mmp_sum = 0.0;
    let mut mpp_max = 0.0f64;
    for c in all_neighborhood_edge_counts(&g0, &sides) {
        mmp_sum += c.e_minus as f64 - c.e_plus as f64;
        let (a, b) = (c.dbar + c.dev_minus, c.dbar + c.dev_plus);
        let main = p0 * ((a - b) * (a - b) - (a + b)) / 2.0;
        let lhs = c.e_minus as f64 + c.e_plus as f64 - c.e_pm as f64;
        mpp_max = mpp_max.max((lhs - main).abs());
    }
    let non_edges: Vec<Edge> = g0.non_edges().collect();
    let mut rng = rng_from_seed(derive_seed(seed, STREAM_UNCONDITIONED));
    let g1u = Graph::from_edges(params.n, sample_subset(&non_edges, params.m1(), &mut rng)?)?;
    let g1 = sample_conditioned_g1(&split, params.m1(), params.alpha, derive_seed(seed, STREAM_G1))?;
    Ok(StatTrial {
        seed,
        e0_pass: report.passes(),
        codeg_gap: gaps.codeg_gap,
        transfer_ratio: if gaps.transfer_bound > 0.0 {
            gaps.transfer_error / gaps.transfer_bound
        } else if gaps.transfer_error == 0.0 {
            0.0
        } else {
            f64::INFINITY
        },
        degree_violations: degrees.violations.len(),
        swap_ok: fpz.swap_ok(),
        mass_ok: fpz.mass_ok(),
        cs_ok: prof.cauchy_schwarz_ok(),
        tomono_ok: prof.tomono_ok() && prof.monochromatic_ok(),
        partition_ok: prof.partition_ok(),
        a2_residual: prof.a2_residual,
        mmp_sum,
        mpp_max,
        unconditioned: count_triangles_by_class(&g0, &g1u)?.total() as f64,
        conditional_exact: exact_class_expectations(&g0, &split, params.m1(), params.alpha)?.total(),
        conditioned: count_triangles_by_class(&g0, &g1)?.total() as f64,
    })
}

/// Replays a statistical-tier `G0` for an instance dump.
fn stat_dump(config: &ExperimentConfig, lemma_id: &str, seed: u64) -> Result<InstanceDump> {
    let params = config.params()?;
    let g0 = sample_gnm(params.n, params.m0(), derive_seed(seed, STREAM_G0))?;
    let split = split_f(&g0)?;
    Ok(InstanceDump {
        lemma_id: lemma_id.to_string(),
        seed,
        graph: edge_list_string(&g0),
        split: Some(split_string(&split)),
        extra: None,
    })
}

fn max_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(f64::NAN, f64::max)
}

/// Banded checks at the configured size.
pub fn statistical_tier(config: &ExperimentConfig) -> Result<VerifyReport> {
    config.validate()?;
    let params = config.params()?;
    let mut trials = Vec::with_capacity(config.trials);
    for_each_ordered(
        config.trials as u64,
        config.workers,
        |id| stat_trial(config, id),
        |_, t| {
            trials.push(t);
            Ok(())
        },
    )?;
    let nf = params.n as f64;
    let pass: Vec<&StatTrial> = trials.iter().filter(|t| t.e0_pass).collect();
    let k = pass.len() as f64;
    let have = !pass.is_empty();
    let mut report = VerifyReport::default();
    let mut row = |id: &str, statistic: f64, bound: f64, ok: bool, exact: bool| {
        report.rows.push(CheckRow {
            lemma_id: id.to_string(),
            n: params.n,
            m: params.m,
            eta: params.eta,
            alpha: params.alpha,
            statistic,
            bound,
            pass: ok,
            exact,
        });
    };

    let rate = k / trials.len() as f64;
    row("lemma5.1_e0_rate", rate, E0_RATE_BOUND, rate >= E0_RATE_BOUND, false);
    let sign = pass.iter().filter(|t| t.codeg_gap < 0.0).count() as f64 / k;
    row("prop4.1_sign", sign, SIGN_RATE_BOUND, have && sign >= SIGN_RATE_BOUND, false);
    let transfer = max_of(pass.iter().map(|t| t.transfer_ratio));
    row("lemma4.2_transfer", transfer, 1.0, have && transfer <= 1.0, false);
    let viol: usize = pass.iter().map(|t| t.degree_violations).sum();
    row("lemma4.3_f_minus_degrees", viol as f64, 0.0, have && viol == 0, false);
    let swap = pass.iter().filter(|t| !t.swap_ok).count();
    row("lemma4.4_swap", swap as f64, 0.0, have && swap == 0, false);
    let mass = pass.iter().filter(|t| !t.mass_ok).count();
    row("lemma4.5_mass", mass as f64, 0.0, have && mass == 0, false);

    let exact_counts = [
        ("eq_a_cauchy_schwarz", trials.iter().filter(|t| !t.cs_ok).count()),
        ("tomono", trials.iter().filter(|t| !t.tomono_ok).count()),
        ("t_partition", trials.iter().filter(|t| !t.partition_ok).count()),
    ];
    for (id, fails) in exact_counts {
        row(id, fails as f64, 0.0, fails == 0, true);
    }

    let a2 = max_of(pass.iter().map(|t| t.a2_residual.abs() / nf.powf(2.6)));
    row("eq_a2_band", a2, A2_BAND, have && a2 <= A2_BAND, false);
    let mmp = max_of(pass.iter().map(|t| t.mmp_sum.abs() / nf.powf(2.5)));
    row("eq_mmp_band", mmp, MMP_BAND, have && mmp <= MMP_BAND, false);
    let mpp = max_of(pass.iter().map(|t| t.mpp_max / nf.powf(1.5)));
    row("eq_mpp_band", mpp, MPP_BAND, have && mpp <= MPP_BAND, false);

    match e_alpha_cost_check(params.n, params.m, params.eta, params.alpha, params.lambda) {
        Ok(tail) => {
            let allowed = 10.0 * (tail.population as f64).ln();
            row("lemmaB1_stirling", tail.log_gap.abs(), allowed, tail.log_gap.abs() <= allowed, false);
            // Outside the corollary's regime the row is informative only.
            row("corB2_cost", tail.exact_log_prob, tail.lower_bound_cost, !tail.in_regime || tail.bound_holds(), false);
        }
        Err(_) => {
            row("lemmaB1_stirling", f64::NAN, f64::NAN, false, false);
            row("corB2_cost", f64::NAN, f64::NAN, false, false);
        }
    }

    // Markov step: if the conditional mean sits below (1 - 2 delta) mu_hat,
    // the frequency of {N < (1 - delta) mu_hat} must clear 1/n less sampling
    // slack. Vacuous when the premise fails.
    let mu_hat = trials.iter().map(|t| t.unconditioned).sum::<f64>() / trials.len() as f64;
    let cond_mean = pass.iter().map(|t| t.conditional_exact).sum::<f64>() / k;
    let delta = config.delta;
    let premise = have && cond_mean <= (1.0 - 2.0 * delta) * mu_hat;
    let freq = pass.iter().filter(|t| t.conditioned < (1.0 - delta) * mu_hat).count() as f64 / k;
    let floor = (1.0 - 5.0 * nf / (pass.len() as f64).sqrt()) / nf;
    row("markov_reduction", freq, floor, !premise || freq >= floor, false);

    let failing_exact: Vec<(&str, u64)> = trials
        .iter()
        .flat_map(|t| {
            [("eq_a_cauchy_schwarz", t.cs_ok), ("tomono", t.tomono_ok), ("t_partition", t.partition_ok)]
                .into_iter()
                .filter(|(_, ok)| !ok)
                .map(move |(id, _)| (id, t.seed))
        })
        .collect();
    for (id, seed) in failing_exact {
        if !report.dumps.iter().any(|d| d.lemma_id == id) {
            report.dumps.push(stat_dump(config, id, seed)?);
        }
    }
    Ok(report)
}

/// Exhaustive tier followed by the statistical tier at the configured size.
pub fn verify_lemmas(config: &ExperimentConfig) -> Result<VerifyReport> {
    let mut report = exhaustive_tier(config.master_seed, EXHAUSTIVE_INSTANCES)?;
    report.extend(statistical_tier(config)?);
    Ok(report)
}
