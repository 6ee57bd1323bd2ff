//! The events behind the construction: quasirandomness of the first phase
//! (`E0`, properties P1-P6) and the biased second phase `E(alpha)`, together
//! with the hypergeometric tail probabilities that price `E(alpha)`.

use alloc::vec::Vec;

use rand::Rng;

use crate::distribution::{self, Verdict};
use crate::error::{param_err, Error, Result};
use crate::graph::{pair_count, Edge, Graph, VertexSet};
use crate::math;
use crate::params::{epsilon, k_minus, ProcessParams};
use crate::sample::{partial_shuffle, rng_from_seed, TrialRng};
use crate::synergy::{split_f, FSplit};

/// Number of random sets (and of random disjoint set pairs) audited for P5
/// and P6 on top of the `F-`/`F+` neighbourhoods.
pub const AUDIT_SETS: usize = 200;

/// Default for the P1 constant. The sum of squared complement codegree
/// deviations concentrates near `q^2(1-q)^2 n^3 / 2`, at most `n^3 / 32`.
pub const DEFAULT_C_D: f64 = 1.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QuasirandomFlags {
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    pub p4: bool,
    pub p5: bool,
    pub p6: bool,
}

impl QuasirandomFlags {
    pub fn all(&self) -> bool {
        self.p1 && self.p2 && self.p3 && self.p4 && self.p5 && self.p6
    }

    pub fn as_array(&self) -> [bool; 6] {
        [self.p1, self.p2, self.p3, self.p4, self.p5, self.p6]
    }
}

/// Observed P1-P6 statistics of `G0` and the thresholds they were held to.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasirandomReport {
    pub n: usize,
    pub p0: f64,
    pub eps: f64,
    pub c_d_used: f64,
    /// `sum_{u<w} D_{G0^c}(u,w)^2`.
    pub p1_codeg_sq_sum: f64,
    /// `C_D n^3`.
    pub p1_threshold: f64,
    /// Vertices whose synergy vector is `eps`-far from normal, counting
    /// vertices without non-neighbours as far.
    pub p2_far_vertex_count: usize,
    /// Largest per-vertex KS distance seen for P2.
    pub p2_max_distance: f64,
    pub p3_max_deg_dev: f64,
    pub p4_max_codeg_dev: f64,
    /// `sqrt(n) ln n`, shared by P3 and P4.
    pub p34_threshold: f64,
    pub p5_max_nbhd_edge_dev: f64,
    pub p6_max_bipartite_dev: f64,
    /// `n^{3/2}`, shared by P5 and P6.
    pub p56_threshold: f64,
    pub p5_sets_checked: usize,
    pub p6_pairs_checked: usize,
    pub flags: QuasirandomFlags,
}

impl QuasirandomReport {
    pub fn passes(&self) -> bool {
        self.flags.all()
    }
}

/// Splits `G0` and checks P1-P6; see [`check_quasirandom_with_split`].
pub fn check_quasirandom(g0: &Graph, c_d: f64, audit_seed: u64) -> Result<QuasirandomReport> {
    let split = split_f(g0)?;
    check_quasirandom_with_split(g0, &split, c_d, audit_seed)
}

/// Checks P1-P6 for `G0`. P5 and P6 cannot be checked over all sets; they
/// are checked over `N_{F-}(u)`, `N_{F+}(u)` and the pair of the two for every
/// vertex `u`, plus [`AUDIT_SETS`] random sets and random disjoint pairs drawn
/// from `audit_seed`.
pub fn check_quasirandom_with_split(g0: &Graph, split: &FSplit, c_d: f64, audit_seed: u64) -> Result<QuasirandomReport> {
    if !(c_d > 0.0) {
        return Err(param_err!("C_D = {c_d} must be positive"));
    }
    if split.n != g0.n() {
        return Err(Error::Contract(alloc::format!("split is on {} vertices, graph on {}", split.n, g0.n())));
    }
    let n = g0.n();
    let nf = n as f64;
    let p0 = g0.density();
    let q0 = 1.0 - p0;
    let eps = epsilon(n);
    let deg = g0.degrees();

    let mut codeg_sq = 0.0f64;
    let mut max_codeg_dev = 0.0f64;
    let comp_mean = q0 * q0 * (nf - 2.0);
    for u in 0..n {
        for w in u + 1..n {
            let c = g0.codegree(u, w);
            max_codeg_dev = max_codeg_dev.max((c as f64 - p0 * p0 * nf).abs());
            let adj = g0.has_edge(u, w) as usize;
            let comp = n + 2 * adj + c - 2 - deg[u] - deg[w];
            let dev = comp as f64 - comp_mean;
            codeg_sq += dev * dev;
        }
    }
    let max_deg_dev = deg.iter().fold(0.0f64, |m, &d| m.max((d as f64 - p0 * nf).abs()));

    let mut far = 0usize;
    let mut max_dist = 0.0f64;
    if n >= 3 && p0 > 0.0 && p0 < 1.0 {
        for (_, report) in distribution::vertex_ks_reports(g0, eps, Some(p0))? {
            match report {
                Some(r) => {
                    max_dist = max_dist.max(r.distance);
                    if r.verdict == Verdict::Far {
                        far += 1;
                    }
                }
                None => far += 1,
            }
        }
    } else {
        // Synergies are identically zero; nothing is close to normal.
        far = n;
        max_dist = 1.0;
    }

    let fm = split.minus_graph();
    let fp = split.plus_graph();
    let mut p5 = 0.0f64;
    let mut p6 = 0.0f64;
    let mut sets = 0usize;
    let mut pairs = 0usize;
    let within = |set: &VertexSet| (g0.edge_count_within(set) as f64 - p0 * pair_count(set.len()) as f64).abs();
    let between =
        |a: &VertexSet, b: &VertexSet| (g0.edge_count_between(a, b) as f64 - p0 * (a.len() * b.len()) as f64).abs();
    for u in 0..n {
        let a = fm.neighborhood(u);
        let b = fp.neighborhood(u);
        p5 = p5.max(within(&a)).max(within(&b));
        p6 = p6.max(between(&a, &b));
        sets += 2;
        pairs += 1;
    }
    let mut rng = rng_from_seed(audit_seed);
    for _ in 0..AUDIT_SETS {
        let size = rng.gen_range(0..=n);
        let set = VertexSet::from_vertices(n, partial_shuffle(n, size, &mut rng))?;
        p5 = p5.max(within(&set));
        sets += 1;
    }
    for _ in 0..AUDIT_SETS {
        let total = rng.gen_range(0..=n);
        let left = rng.gen_range(0..=total);
        let order = partial_shuffle(n, total, &mut rng);
        let a = VertexSet::from_vertices(n, order[..left].iter().copied())?;
        let b = VertexSet::from_vertices(n, order[left..].iter().copied())?;
        p6 = p6.max(between(&a, &b));
        pairs += 1;
    }

    let p1_threshold = c_d * nf * nf * nf;
    let p34 = math::sqrt(nf) * math::ln(nf);
    let p56 = nf * math::sqrt(nf);
    let flags = QuasirandomFlags {
        p1: codeg_sq <= p1_threshold,
        p2: far == 0,
        p3: max_deg_dev <= p34,
        p4: max_codeg_dev <= p34,
        p5: p5 <= p56,
        p6: p6 <= p56,
    };
    Ok(QuasirandomReport {
        n,
        p0,
        eps,
        c_d_used: c_d,
        p1_codeg_sq_sum: codeg_sq,
        p1_threshold,
        p2_far_vertex_count: far,
        p2_max_distance: max_dist,
        p3_max_deg_dev: max_deg_dev,
        p4_max_codeg_dev: max_codeg_dev,
        p34_threshold: p34,
        p5_max_nbhd_edge_dev: p5,
        p6_max_bipartite_dev: p6,
        p56_threshold: p56,
        p5_sets_checked: sets,
        p6_pairs_checked: pairs,
        flags,
    })
}

/// `k-` for the split, checked against both side sizes.
pub fn feasible_k_minus(split: &FSplit, m1: usize, alpha: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(param_err!("alpha = {alpha} outside [0,1]"));
    }
    let k = k_minus(m1, alpha);
    if k > split.f_minus.len() || m1 - k > split.f_plus.len() {
        return Err(param_err!(
            "k- = {k} of m1 = {m1} does not fit |F-| = {}, |F+| = {}",
            split.f_minus.len(),
            split.f_plus.len()
        ));
    }
    Ok(k)
}

/// The second-phase edges under `E(alpha)`: `k-` uniform pairs of `F-`
/// followed by `m1 - k-` uniform pairs of `F+`. Given the split, this is the
/// exact law of `G1` conditioned on `|F- ∩ E(G1)| = k-`.
pub fn sample_conditioned_edges(split: &FSplit, m1: usize, alpha: f64, rng: &mut TrialRng) -> Result<Vec<Edge>> {
    let k = feasible_k_minus(split, m1, alpha)?;
    let mut edges = Vec::with_capacity(m1);
    edges.extend(partial_shuffle(split.f_minus.len(), k, rng).into_iter().map(|i| split.f_minus[i]));
    edges.extend(partial_shuffle(split.f_plus.len(), m1 - k, rng).into_iter().map(|i| split.f_plus[i]));
    Ok(edges)
}

pub fn sample_conditioned_g1(split: &FSplit, m1: usize, alpha: f64, seed: u64) -> Result<Graph> {
    let mut rng = rng_from_seed(seed);
    let edges = sample_conditioned_edges(split, m1, alpha, &mut rng)?;
    Graph::from_edges(split.n, edges)
}

/// `ln P(X = k)` for `X ~ Hyp(population, successes, draws)`; `-inf` off the
/// support.
pub fn hypergeom_log_pmf(population: u64, successes: u64, draws: u64, k: u64) -> Result<f64> {
    if successes > population || draws > population {
        return Err(param_err!("Hyp({population}, {successes}, {draws}) is inconsistent"));
    }
    let lo = (draws + successes).saturating_sub(population);
    if k < lo || k > successes.min(draws) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(math::ln_choose(successes, k) + math::ln_choose(population - successes, draws - k)
        - math::ln_choose(population, draws))
}

/// Main terms of the log-probability that `2pM` uniform draws from `[2M]`
/// put `(1+alpha)pM` of them in `[M]`:
/// `-(p/(1-p)) alpha^2 M - ((p - 2p^2 + 2p^3)/(1-p)^2) alpha^3 M`.
pub fn stirling_tail_estimate(m: f64, p: f64, alpha: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(param_err!("M = {m} must be positive"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(param_err!("p = {p} outside (0,1)"));
    }
    if !(alpha >= 0.0 && alpha < 1.0_f64.min((1.0 - p) / p)) {
        return Err(param_err!("alpha = {alpha} outside [0, min(1, (1-p)/p))"));
    }
    Ok(stirling_terms(m, p, alpha))
}

fn stirling_terms(m: f64, p: f64, alpha: f64) -> f64 {
    let q = 1.0 - p;
    -(p / q) * alpha * alpha * m - ((p - 2.0 * p * p + 2.0 * p * p * p) / (q * q)) * alpha * alpha * alpha * m
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperTailResult {
    pub exact_log_prob: f64,
    pub stirling_estimate: f64,
    /// `-alpha^2 M / lambda`.
    pub lower_bound_cost: f64,
    pub log_gap: f64,
    pub population: u64,
    pub draws: u64,
    /// The value whose probability is evaluated, `round((1+alpha) draws / 2)`.
    pub target: u64,
    /// Whether `(alpha, draws/population, lambda)` lies where the lower bound
    /// is claimed: `10 ln M / M <= alpha <= 1/2` and `draws/M <= 1 - lambda`.
    pub in_regime: bool,
}

impl HyperTailResult {
    pub fn bound_holds(&self) -> bool {
        self.exact_log_prob >= self.lower_bound_cost
    }
}

/// Tail of `Hyp(M, floor(M/2), draws)` at `round((1+alpha) draws / 2)`, with
/// the Stirling main terms evaluated at half-population `M/2` and
/// `p = draws / M`.
pub fn half_urn_tail(population: u64, draws: u64, alpha: f64, lambda: f64) -> Result<HyperTailResult> {
    if population < 2 || draws == 0 || draws > population {
        return Err(param_err!("need 0 < draws <= population, population >= 2"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(param_err!("alpha = {alpha} outside [0,1]"));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(param_err!("lambda = {lambda} outside (0,1)"));
    }
    let target = k_minus(draws as usize, alpha) as u64;
    let exact = hypergeom_log_pmf(population, population / 2, draws, target)?;
    let mf = population as f64;
    let p = draws as f64 / mf;
    let stirling = stirling_terms(mf / 2.0, p, alpha);
    let in_regime = alpha >= 10.0 * math::ln(mf) / mf && alpha <= 0.5 && p <= 1.0 - lambda;
    Ok(HyperTailResult {
        exact_log_prob: exact,
        stirling_estimate: stirling,
        lower_bound_cost: -alpha * alpha * mf / lambda,
        log_gap: exact - stirling,
        population,
        draws,
        target,
        in_regime,
    })
}

/// Price of `E(alpha)`: `Hyp(N - m0, floor((N - m0)/2), m1)` at `k-`.
pub fn e_alpha_cost_check(n: usize, m: usize, eta: f64, alpha: f64, lambda: f64) -> Result<HyperTailResult> {
    let params = ProcessParams::new(n, m, eta, 0.0, lambda, alpha)?;
    if params.m1() == 0 {
        return Err(Error::Infeasible("m1 = 0: the second phase is empty".into()));
    }
    let population = (params.pairs() - params.m0()) as u64;
    let res = half_urn_tail(population, params.m1() as u64, alpha, lambda)?;
    if res.exact_log_prob == f64::NEG_INFINITY {
        return Err(Error::Infeasible(alloc::format!("k- = {} is outside the support", res.target)));
    }
    Ok(res)
}
