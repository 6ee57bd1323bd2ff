//! Exact bookkeeping for the triangle classes of `G0 ∪ G1`: codegree and
//! synergy sums over `F-`/`F+`, neighbourhood edge counts, conditional class
//! expectations given `E(alpha)` and `G0`, and the Goodman-type identities for
//! triangles of the complement of `G0`.

use alloc::vec::Vec;

use crate::conditioning::feasible_k_minus;
use crate::error::{param_err, Error, Result};
use crate::graph::{count_triangles, mixed_triangle_counts, pair_count, Graph, VertexSet};
use crate::math;
use crate::params::epsilon;
use crate::synergy::{self, FSplit};

/// `F-` and `F+` as graphs, built once per split.
#[derive(Clone, Debug)]
pub struct SplitGraphs {
    pub minus: Graph,
    pub plus: Graph,
}

impl SplitGraphs {
    pub fn new(g0: &Graph, split: &FSplit) -> Result<Self> {
        if split.n != g0.n() {
            return Err(Error::Contract(alloc::format!("split is on {} vertices, graph on {}", split.n, g0.n())));
        }
        if split.non_edge_count() != pair_count(g0.n()) - g0.m() {
            return Err(Error::Contract("split does not cover the non-edges of G0".into()));
        }
        Ok(SplitGraphs { minus: split.minus_graph(), plus: split.plus_graph() })
    }
}

fn codegree_sum(g0: &Graph, side: &Graph) -> u64 {
    side.edges().map(|(u, w)| g0.codegree(u, w) as u64).sum()
}

/// `sum_{F-} d(u,w) - sum_{F+} d(u,w)`, codegrees taken in `G0`.
pub fn codegree_sum_gap(g0: &Graph, split: &FSplit) -> Result<f64> {
    let sides = SplitGraphs::new(g0, split)?;
    Ok(codegree_sum(g0, &sides.minus) as f64 - codegree_sum(g0, &sides.plus) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SumGaps {
    pub codeg_gap: f64,
    /// `sum_{F-} S - sum_{F+} S` at `p0 = e(G0)/N`.
    pub syn_gap: f64,
    /// `|codeg_gap - syn_gap|`.
    pub transfer_error: f64,
    /// `D = max_u |d(u) - p0 n|`.
    pub max_deg_dev: f64,
    /// `4 p0 eps D n^2`.
    pub transfer_bound: f64,
}

impl SumGaps {
    pub fn transfer_ok(&self) -> bool {
        self.transfer_error <= self.transfer_bound
    }
}

pub fn synergy_sum_gap(g0: &Graph, split: &FSplit) -> Result<SumGaps> {
    let sides = SplitGraphs::new(g0, split)?;
    let n = g0.n();
    let p0 = g0.density();
    let deg = g0.degrees();
    let side_sum = |side: &Graph| -> (f64, f64) {
        let mut codeg = 0u64;
        let mut syn = 0.0;
        for (u, w) in side.edges() {
            let c = g0.codegree(u, w);
            codeg += c as u64;
            syn += synergy::synergy_from_counts(n, deg[u], deg[w], c, p0);
        }
        (codeg as f64, syn)
    };
    let (cm, sm) = side_sum(&sides.minus);
    let (cp, sp) = side_sum(&sides.plus);
    let codeg_gap = cm - cp;
    let syn_gap = sm - sp;
    let nf = n as f64;
    let max_deg_dev = deg.iter().fold(0.0f64, |m, &d| m.max((d as f64 - p0 * nf).abs()));
    Ok(SumGaps {
        codeg_gap,
        syn_gap,
        transfer_error: (codeg_gap - syn_gap).abs(),
        max_deg_dev,
        transfer_bound: 4.0 * p0 * epsilon(n) * max_deg_dev * nf * nf,
    })
}

/// Closed form of `codeg_gap - syn_gap`:
/// `p0 sum_u (d(u) - p0 n)(d_{F-}(u) - d_{F+}(u)) + p0^2 (n+2)(|F-| - |F+|)`.
/// The last term vanishes when `N - m0` is even.
pub fn transfer_identity_rhs(g0: &Graph, split: &FSplit) -> Result<f64> {
    let sides = SplitGraphs::new(g0, split)?;
    let n = g0.n();
    let nf = n as f64;
    let p0 = g0.density();
    let mut acc = 0.0;
    for u in 0..n {
        let delta = sides.minus.degree(u) as f64 - sides.plus.degree(u) as f64;
        acc += (g0.degree(u) as f64 - p0 * nf) * delta;
    }
    let size_diff = split.f_minus.len() as f64 - split.f_plus.len() as f64;
    Ok(p0 * acc + p0 * p0 * (nf + 2.0) * size_diff)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeProfile {
    pub eps: f64,
    /// `max_u |d_{F-}(u) / (n - d(u) - 1) - 1/2|` over vertices with
    /// non-neighbours.
    pub max_rel_dev: f64,
    /// Vertices with `d_{F-}(u)` outside `(1/2 ± 2 eps)(n - d(u) - 1)`.
    pub violations: Vec<usize>,
}

/// `F-` degrees against `(1/2 ± 2 eps)(n - d(u) - 1)`.
pub fn f_minus_degree_profile(g0: &Graph, split: &FSplit) -> Result<DegreeProfile> {
    let sides = SplitGraphs::new(g0, split)?;
    let n = g0.n();
    let eps = epsilon(n);
    let mut max_rel_dev = 0.0f64;
    let mut violations = Vec::new();
    for u in 0..n {
        let full = (n - g0.degree(u) - 1) as f64;
        if full == 0.0 {
            continue;
        }
        let dm = sides.minus.degree(u) as f64;
        max_rel_dev = max_rel_dev.max((dm / full - 0.5).abs());
        if dm < (0.5 - 2.0 * eps) * full || dm > (0.5 + 2.0 * eps) * full {
            violations.push(u);
        }
    }
    Ok(DegreeProfile { eps, max_rel_dev, violations })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FPlusZeroSums {
    /// `sum` of `S` over non-edges with `S >= 0`.
    pub sum_fp0: f64,
    pub sum_fp: f64,
    pub sum_fm: f64,
    /// `sigma_{p0}`.
    pub sigma: f64,
    pub non_edges: usize,
    /// `9 eps^2 (N - m0) sigma`.
    pub swap_bound: f64,
    /// `sigma (N - m0) / sqrt(2 pi)`.
    pub half_normal_mass: f64,
}

impl FPlusZeroSums {
    pub fn swap_ok(&self) -> bool {
        (self.sum_fp0 - self.sum_fp).abs() <= self.swap_bound
    }

    /// `sum_fp0 >= 0.9 sigma (N - m0) / sqrt(2 pi)`.
    pub fn mass_ok(&self) -> bool {
        self.sum_fp0 >= 0.9 * self.half_normal_mass
    }
}

pub fn f_plus_zero_sums(g0: &Graph, split: &FSplit) -> Result<FPlusZeroSums> {
    let sides = SplitGraphs::new(g0, split)?;
    let n = g0.n();
    let p0 = g0.density();
    let sigma = synergy::sigma_p(n, p0)?;
    let (mut fp0, mut fp, mut fm) = (0.0, 0.0, 0.0);
    for ((u, w), s) in synergy::non_edge_synergies(g0, p0) {
        if s >= 0.0 {
            fp0 += s;
        }
        if sides.minus.has_edge(u, w) {
            fm += s;
        } else {
            fp += s;
        }
    }
    let non_edges = split.non_edge_count();
    let eps = epsilon(n);
    Ok(FPlusZeroSums {
        sum_fp0: fp0,
        sum_fp: fp,
        sum_fm: fm,
        sigma,
        non_edges,
        swap_bound: 9.0 * eps * eps * non_edges as f64 * sigma,
        half_normal_mass: sigma * non_edges as f64 / math::sqrt(2.0 * core::f64::consts::PI),
    })
}

/// Edges of `G0` inside and between the `F-`- and `F+`-neighbourhoods of `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborhoodEdgeCounts {
    pub u: usize,
    pub e_minus: u64,
    pub e_pm: u64,
    pub e_plus: u64,
    /// `(n - d(u) - 1) / 2`.
    pub dbar: f64,
    pub dev_minus: f64,
    pub dev_plus: f64,
}

impl NeighborhoodEdgeCounts {
    /// Edges of `G0` among the non-neighbours of `u`.
    pub fn e_total(&self) -> u64 {
        self.e_minus + self.e_pm + self.e_plus
    }
}

fn nbhd_counts_with(g0: &Graph, sides: &SplitGraphs, u: usize) -> NeighborhoodEdgeCounts {
    let a: VertexSet = sides.minus.neighborhood(u);
    let b: VertexSet = sides.plus.neighborhood(u);
    let dbar = (g0.n() - g0.degree(u) - 1) as f64 / 2.0;
    NeighborhoodEdgeCounts {
        u,
        e_minus: g0.edge_count_within(&a) as u64,
        e_pm: g0.edge_count_between(&a, &b) as u64,
        e_plus: g0.edge_count_within(&b) as u64,
        dbar,
        dev_minus: a.len() as f64 - dbar,
        dev_plus: b.len() as f64 - dbar,
    }
}

pub fn neighborhood_edge_counts(g0: &Graph, split: &FSplit, u: usize) -> Result<NeighborhoodEdgeCounts> {
    if u >= g0.n() {
        return Err(param_err!("vertex {u} out of range"));
    }
    let sides = SplitGraphs::new(g0, split)?;
    Ok(nbhd_counts_with(g0, &sides, u))
}

/// [`NeighborhoodEdgeCounts`] for every vertex.
pub fn all_neighborhood_edge_counts(g0: &Graph, sides: &SplitGraphs) -> Vec<NeighborhoodEdgeCounts> {
    (0..g0.n()).map(|u| nbhd_counts_with(g0, sides, u)).collect()
}

/// Inclusion probabilities of pairs of `F-`/`F+` under `E(alpha)`: `k-`
/// uniform picks among `|F-|` and `m1 - k-` among `|F+|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InclusionLaw {
    pub k_minus: usize,
    pub k_plus: usize,
    pub f_minus: usize,
    pub f_plus: usize,
}

impl InclusionLaw {
    pub fn new(split: &FSplit, m1: usize, alpha: f64) -> Result<Self> {
        let k = feasible_k_minus(split, m1, alpha)?;
        Ok(InclusionLaw { k_minus: k, k_plus: m1 - k, f_minus: split.f_minus.len(), f_plus: split.f_plus.len() })
    }

    /// Probability that a fixed set of `i` pairs of `F-` and `j` pairs of
    /// `F+` all land in `G1`.
    pub fn joint(&self, i: u64, j: u64) -> f64 {
        let side = |k: usize, f: usize, t: u64| {
            if t == 0 {
                1.0
            } else if (f as u64) < t {
                0.0
            } else {
                math::falling(k as u64, t) / math::falling(f as u64, t)
            }
        };
        side(self.k_minus, self.f_minus, i) * side(self.k_plus, self.f_plus, j)
    }
}

/// `E[triangles with one G1 edge | E(alpha), G0]`: each `F-` pair is in `G1`
/// with probability `k-/|F-|`, each `F+` pair with `(m1 - k-)/|F+|`.
pub fn exact_class21_expectation(g0: &Graph, split: &FSplit, m1: usize, alpha: f64) -> Result<f64> {
    let sides = SplitGraphs::new(g0, split)?;
    let law = InclusionLaw::new(split, m1, alpha)?;
    Ok(law.joint(1, 0) * codegree_sum(g0, &sides.minus) as f64 + law.joint(0, 1) * codegree_sum(g0, &sides.plus) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Class12Expectation {
    pub exact: f64,
    /// `r1^2 sum_u ((1+a)^2 e_-(u) + (1-a^2) e_pm(u) + (1-a)^2 e_+(u))`.
    pub approx_form: f64,
}

/// `E[triangles with two G1 edges | E(alpha), G0]`. Such a triangle has a
/// unique apex `u` opposite its `G0` edge, and both apex pairs are non-edges
/// of `G0`; the three terms are the `F-F-`, `F-F+` and `F+F+` cases.
pub fn exact_class12_expectation(g0: &Graph, split: &FSplit, m1: usize, alpha: f64) -> Result<Class12Expectation> {
    let sides = SplitGraphs::new(g0, split)?;
    class12_with(g0, split, &sides, m1, alpha)
}

fn class12_with(g0: &Graph, split: &FSplit, sides: &SplitGraphs, m1: usize, alpha: f64) -> Result<Class12Expectation> {
    let law = InclusionLaw::new(split, m1, alpha)?;
    if law.f_minus < 2 || law.f_plus < 2 {
        return Err(Error::Degenerate("class (1,2) needs |F-|, |F+| >= 2".into()));
    }
    let (mut em, mut epm, mut ep) = (0u64, 0u64, 0u64);
    for c in all_neighborhood_edge_counts(g0, sides) {
        em += c.e_minus;
        epm += c.e_pm;
        ep += c.e_plus;
    }
    let (em, epm, ep) = (em as f64, epm as f64, ep as f64);
    let exact = law.joint(2, 0) * em + law.joint(1, 1) * epm + law.joint(0, 2) * ep;
    let r1 = m1 as f64 / split.non_edge_count() as f64;
    let a = alpha;
    let approx_form = r1 * r1 * ((1.0 + a) * (1.0 + a) * em + (1.0 - a * a) * epm + (1.0 - a) * (1.0 - a) * ep);
    Ok(Class12Expectation { exact, approx_form })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Class03Expectation {
    /// `sum_i T_i P(i pairs of F- and 3-i of F+ all in G1)`.
    pub exact: f64,
    /// `p1^3 C(n,3) + alpha r1^3 (3T3+T2-T1-3T0) + alpha^2 r1^3 (3T3-T2-T1+3T0)
    /// + alpha^3 r1^3 (T3-T2+T1-T0)`, with the constant term averaged over `G0`.
    pub approx_form: f64,
    /// Same expansion with the constant term `r1^3 N(G0^c)` for this `G0`.
    pub given_g0_form: f64,
}

pub fn class03_expectation(g0: &Graph, split: &FSplit, m1: usize, alpha: f64) -> Result<Class03Expectation> {
    let sides = SplitGraphs::new(g0, split)?;
    let t = t_counts(&sides);
    class03_with(g0, split, t, m1, alpha)
}

fn class03_with(g0: &Graph, split: &FSplit, t: [u64; 4], m1: usize, alpha: f64) -> Result<Class03Expectation> {
    let law = InclusionLaw::new(split, m1, alpha)?;
    if law.f_minus < 3 || law.f_plus < 3 {
        return Err(Error::Degenerate("class (0,3) needs |F-|, |F+| >= 3".into()));
    }
    let exact: f64 = (0..4u64).map(|i| t[i as usize] as f64 * law.joint(i, 3 - i)).sum();
    let [t0, t1, t2, t3] = t.map(|v| v as f64);
    let r1 = m1 as f64 / split.non_edge_count() as f64;
    let r3 = r1 * r1 * r1;
    let a = alpha;
    let tail = a * r3 * (3.0 * t3 + t2 - t1 - 3.0 * t0)
        + a * a * r3 * (3.0 * t3 - t2 - t1 + 3.0 * t0)
        + a * a * a * r3 * (t3 - t2 + t1 - t0);
    let p1 = m1 as f64 / pair_count(g0.n()) as f64;
    let n = g0.n() as u64;
    Ok(Class03Expectation {
        exact,
        approx_form: p1 * p1 * p1 * math::choose_small(n, 3) + tail,
        given_g0_form: r3 * (t0 + t1 + t2 + t3) + tail,
    })
}

/// Exact `E[class counts | E(alpha), G0]`; the `(3,0)` class is `N(G0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassExpectations {
    pub t30: f64,
    pub t21: f64,
    pub t12: f64,
    pub t03: f64,
}

impl ClassExpectations {
    pub fn total(&self) -> f64 {
        self.t30 + self.t21 + self.t12 + self.t03
    }
}

pub fn exact_class_expectations(g0: &Graph, split: &FSplit, m1: usize, alpha: f64) -> Result<ClassExpectations> {
    let sides = SplitGraphs::new(g0, split)?;
    let law = InclusionLaw::new(split, m1, alpha)?;
    let t21 = law.joint(1, 0) * codegree_sum(g0, &sides.minus) as f64
        + law.joint(0, 1) * codegree_sum(g0, &sides.plus) as f64;
    let t12 = class12_with(g0, split, &sides, m1, alpha)?.exact;
    let t03 = class03_with(g0, split, t_counts(&sides), m1, alpha)?.exact;
    Ok(ClassExpectations { t30: count_triangles(g0) as f64, t21, t12, t03 })
}

/// Monochromatic triangle count and the Goodman-type right-hand side
/// `sum_v e(G[N_R(v)]) + sum_v e(G[N_B(v)]) - N(G)`, which equals `2 n_mc`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoodmanCheck {
    pub n_mc: u64,
    pub rhs: i64,
}

impl GoodmanCheck {
    pub fn holds(&self) -> bool {
        2 * self.n_mc as i64 == self.rhs
    }
}

/// `red` must be a subgraph of `g`; the blue edges are the rest of `g`.
pub fn goodman_monochromatic(g: &Graph, red: &Graph) -> Result<GoodmanCheck> {
    if red.n() != g.n() || !red.is_subgraph_of(g) {
        return Err(param_err!("red edges must be a subset of E(G)"));
    }
    let mut blue = g.clone();
    for (u, w) in red.edges() {
        blue.remove_edge(u, w)?;
    }
    let n_mc = count_triangles(red) + count_triangles(&blue);
    let mut sum = 0i64;
    for v in 0..g.n() {
        sum += g.edge_count_within(&red.neighborhood(v)) as i64;
        sum += g.edge_count_within(&blue.neighborhood(v)) as i64;
    }
    Ok(GoodmanCheck { n_mc, rhs: sum - count_triangles(g) as i64 })
}

/// Triangles of `G0^c` by the number of their edges in `F-`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TClassProfile {
    pub t0: u64,
    pub t1: u64,
    pub t2: u64,
    pub t3: u64,
    /// Monochromatic triangles of `G0^c`, from the Goodman identity.
    pub n_mc: u64,
    pub n_tri_comp: u64,
    /// `3T3 + T2 - T1 - 3T0`.
    pub a_lhs: i64,
    /// `|F-| - |F+|` scaled by the mean complement codegree `q0^2 (n-2)`.
    pub a_centering: f64,
    /// `((N - m0) sum_{uw not in G0} D_{G0^c}(u,w)^2)^{1/2}`.
    pub a_bound: f64,
    /// `3T3 - T2 - T1 + 3T0`.
    pub a2_lhs: i64,
    /// `a2_lhs - (q0^3 n^3 / 2 - 3 N(G0^c))`.
    pub a2_residual: f64,
}

impl TClassProfile {
    pub fn partition_ok(&self) -> bool {
        self.t0 + self.t1 + self.t2 + self.t3 == self.n_tri_comp
    }

    /// `3T3 - T2 - T1 + 3T0 = 4 N_MC - N(G0^c)`.
    pub fn tomono_ok(&self) -> bool {
        self.a2_lhs == 4 * self.n_mc as i64 - self.n_tri_comp as i64
    }

    pub fn monochromatic_ok(&self) -> bool {
        self.n_mc == self.t0 + self.t3
    }

    /// Cauchy-Schwarz step: `|a_lhs - a_centering| <= a_bound`, up to float
    /// rounding in the bound.
    pub fn cauchy_schwarz_ok(&self) -> bool {
        (self.a_lhs as f64 - self.a_centering).abs() <= self.a_bound * (1.0 + 1e-9) + 1e-9
    }
}

fn t_counts(sides: &SplitGraphs) -> [u64; 4] {
    mixed_triangle_counts(&sides.minus, &sides.plus)
}

pub fn t_class_profile(g0: &Graph, split: &FSplit) -> Result<TClassProfile> {
    let sides = SplitGraphs::new(g0, split)?;
    let [t0, t1, t2, t3] = t_counts(&sides);
    let comp = g0.complement();
    let n_tri_comp = count_triangles(&comp);
    let goodman = goodman_monochromatic(&comp, &sides.minus)?;
    if !goodman.holds() {
        return Err(Error::Contract("Goodman identity failed".into()));
    }
    let n_mc = (goodman.rhs / 2) as u64;

    let n = g0.n();
    let nf = n as f64;
    let q0 = comp.density();
    let mean = q0 * q0 * (nf - 2.0);
    let sq: f64 = comp
        .edges()
        .map(|(u, w)| {
            let d = comp.codegree(u, w) as f64 - mean;
            d * d
        })
        .sum();
    let non_edges = split.non_edge_count() as f64;
    let size_diff = split.f_minus.len() as f64 - split.f_plus.len() as f64;
    let a_lhs = 3 * t3 as i64 + t2 as i64 - t1 as i64 - 3 * t0 as i64;
    let a2_lhs = 3 * t3 as i64 - t2 as i64 - t1 as i64 + 3 * t0 as i64;
    Ok(TClassProfile {
        t0,
        t1,
        t2,
        t3,
        n_mc,
        n_tri_comp,
        a_lhs,
        a_centering: mean * size_diff,
        a_bound: math::sqrt(non_edges * sq),
        a2_lhs,
        a2_residual: a2_lhs as f64 - (q0 * q0 * q0 * nf * nf * nf / 2.0 - 3.0 * n_tri_comp as f64),
    })
}
