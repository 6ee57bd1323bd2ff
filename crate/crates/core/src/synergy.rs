//! Synergy statistics and the split of the non-edges of `G0` into `F-`/`F+`.
//!
//! The `p`-synergy of a pair is the recentred codegree
//! `S(u,w) = d(u,w) - p d(u) - p d(w) + p^2 (n-2)`; without an explicit `p`
//! the edge density `e(G)/N` is used. Low-synergy non-edges close fewer
//! triangles when they are added, which is what `F-` collects.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{param_err, Error, Result};
use crate::graph::{pair_count, Edge, Graph, VertexSet};
use crate::math;

/// Synergy from precomputed counts. Degrees are summed before scaling so
/// that pairs with equal `(codeg, d_u + d_w)` get bitwise-equal values.
#[inline]
pub fn synergy_from_counts(n: usize, d_u: usize, d_w: usize, codeg: usize, p: f64) -> f64 {
    codeg as f64 - p * (d_u + d_w) as f64 + p * p * (n as f64 - 2.0)
}

fn resolve_density(g: &Graph, p: Option<f64>) -> Result<f64> {
    match p {
        None => Ok(g.density()),
        Some(p) if (0.0..=1.0).contains(&p) => Ok(p),
        Some(p) => Err(param_err!("p = {p} outside [0,1]")),
    }
}

/// `S^p_G(u, w)`; `p = None` means `e(G)/N`.
pub fn synergy(g: &Graph, u: usize, w: usize, p: Option<f64>) -> Result<f64> {
    let c = crate::graph::local_counts(g, u, w)?;
    let p = resolve_density(g, p)?;
    Ok(synergy_from_counts(g.n(), c.d_u, c.d_w, c.codeg, p))
}

/// `sigma_p = sqrt(p^2 (1-p)^2 (n-2))`, the standard deviation of the
/// synergy of a non-adjacent pair in `G(n,p)`.
pub fn sigma_p(n: usize, p: f64) -> Result<f64> {
    if n < 3 {
        return Err(param_err!("sigma_p needs n >= 3, got {n}"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(param_err!("p = {p} outside [0,1]"));
    }
    Ok(p * (1.0 - p) * math::sqrt(n as f64 - 2.0))
}

/// Conditional standard deviation, given `N(u)`, of the probe sum behind a
/// relative synergy with a probe set of size `k`:
/// `sqrt(p(1-p)^3 d_u + p^3(1-p)(n-k-d_u-1))`.
pub fn sigma_u(n: usize, k: usize, d_u: usize, p: f64) -> Result<f64> {
    if n == 0 || d_u > n - 1 {
        return Err(param_err!("degree {d_u} out of range for n = {n}"));
    }
    if k > n - 1 - d_u {
        return Err(param_err!("probe size {k} exceeds the {} non-neighbours", n - 1 - d_u));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(param_err!("p = {p} outside [0,1]"));
    }
    let q = 1.0 - p;
    let var = p * q * q * q * d_u as f64 + p * p * p * q * (n - k - d_u - 1) as f64;
    Ok(math::sqrt(var))
}

/// Normalised synergies `S(u,w) / sigma_p` of `u` against each of its
/// non-neighbours, in ascending order of `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct SynergyVector {
    pub u: usize,
    pub values: Vec<f64>,
    pub p_used: f64,
    pub sigma: f64,
}

impl SynergyVector {
    /// Undo the normalisation.
    pub fn raw(&self) -> Vec<f64> {
        self.values.iter().map(|v| v * self.sigma).collect()
    }
}

pub fn normalized_synergy_vector(g: &Graph, u: usize, p: Option<f64>) -> Result<SynergyVector> {
    if u >= g.n() {
        return Err(param_err!("vertex {u} out of range"));
    }
    let p = resolve_density(g, p)?;
    let sigma = sigma_p(g.n(), p)?;
    let non_nbrs = g.non_neighborhood(u);
    if non_nbrs.is_empty() {
        return Err(Error::Empty(alloc::format!("vertex {u} has no non-neighbours")));
    }
    if sigma == 0.0 {
        return Err(Error::Degenerate(alloc::format!("sigma_p vanishes at p = {p}")));
    }
    let d_u = g.degree(u);
    let values = non_nbrs
        .iter()
        .map(|w| synergy_from_counts(g.n(), d_u, g.degree(w), g.codegree(u, w), p) / sigma)
        .collect();
    Ok(SynergyVector { u, values, p_used: p, sigma })
}

/// Like [`normalized_synergy_vector`] but reusing a degree table; used when
/// every vertex is processed.
pub(crate) fn normalized_with_degrees(g: &Graph, degrees: &[usize], u: usize, p: f64, sigma: f64) -> Vec<f64> {
    let n = g.n();
    (0..n)
        .filter(|&w| w != u && !g.has_edge(u, w))
        .map(|w| synergy_from_counts(n, degrees[u], degrees[w], g.codegree(u, w), p) / sigma)
        .collect()
}

/// Relative synergy of `w` with respect to `u` and the probe set `I`:
///
/// `d(u,w) - p d(u) - p |N(w) \ I| + p^2 (n - |I| - 1)`.
///
/// It replaces the number of neighbours `w` has inside `I` by its mean, so
/// that `S(u,w) - S(u,w|I) = p^2(|I|-1) - p|N(w) ∩ I|` exactly and, given
/// `N(u)`, the values for different `w ∈ I` are functions of disjoint edge
/// sets. The variant `-p|N(w) \ I| - p d_{G[V\I]}(w)` (degree term of `w`
/// taken twice, no `d(u)` term) does not satisfy that difference identity and
/// is not used.
pub fn relative_synergy(g: &Graph, u: usize, w: usize, probe: &VertexSet, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(param_err!("p = {p} outside [0,1]"));
    }
    if u >= g.n() || w >= g.n() || probe.universe() != g.n() {
        return Err(param_err!("vertex or probe set out of range"));
    }
    if !probe.contains(w) {
        return Err(param_err!("w = {w} is not in the probe set"));
    }
    if probe.contains(u) || probe.iter().any(|x| g.has_edge(u, x)) {
        return Err(param_err!("probe set must consist of non-neighbours of u = {u}"));
    }
    let n = g.n();
    let k = probe.len();
    let outside = g.degree(w) - g.degree_into(w, probe);
    Ok(g.codegree(u, w) as f64 - p * g.degree(u) as f64 - p * outside as f64 + p * p * (n - k - 1) as f64)
}

/// How pairs tied with the median synergy were allotted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TiePolicy {
    /// Secondary sort key; always `"lexicographic-pair"`: `(u, w)` ascending.
    pub rule: String,
    /// Non-edges with synergy equal to the median placed in `F-`.
    pub ties_in_minus: usize,
    /// ... and in `F+`.
    pub ties_in_plus: usize,
}

/// Partition of the non-edges of `G0` into the lower half `F-` and the
/// upper half `F+` by synergy.
#[derive(Clone, Debug, PartialEq)]
pub struct FSplit {
    pub n: usize,
    pub f_minus: Vec<Edge>,
    pub f_plus: Vec<Edge>,
    /// Synergy of the last pair in `F-`.
    pub median_synergy: f64,
    pub tie_policy: TiePolicy,
}

impl FSplit {
    pub fn non_edge_count(&self) -> usize {
        self.f_minus.len() + self.f_plus.len()
    }

    pub fn minus_graph(&self) -> Graph {
        Graph::from_edges(self.n, self.f_minus.iter().copied()).expect("split edges are distinct pairs")
    }

    pub fn plus_graph(&self) -> Graph {
        Graph::from_edges(self.n, self.f_plus.iter().copied()).expect("split edges are distinct pairs")
    }

    /// Checks that the split partitions exactly the non-edges of `g0`.
    pub fn check_against(&self, g0: &Graph) -> Result<()> {
        if self.n != g0.n() {
            return Err(Error::Contract(alloc::format!("split is on {} vertices, graph on {}", self.n, g0.n())));
        }
        if self.non_edge_count() != pair_count(g0.n()) - g0.m() {
            return Err(Error::Contract("split does not cover the non-edges of G0".into()));
        }
        let mut seen = Graph::empty(self.n);
        for &(u, w) in self.f_minus.iter().chain(&self.f_plus) {
            if g0.has_edge(u, w) {
                return Err(Error::Contract(alloc::format!("split pair {u}-{w} is an edge of G0")));
            }
            if !seen.add_edge(u, w).map_err(|_| Error::Contract(alloc::format!("bad pair {u}-{w}")))? {
                return Err(Error::Contract(alloc::format!("pair {u}-{w} appears twice")));
            }
        }
        Ok(())
    }
}

/// Every non-edge of `g` with its synergy at density `p`, in lexicographic
/// pair order.
pub fn non_edge_synergies(g: &Graph, p: f64) -> Vec<(Edge, f64)> {
    let n = g.n();
    let deg = g.degrees();
    g.non_edges().map(|(u, w)| ((u, w), synergy_from_counts(n, deg[u], deg[w], g.codegree(u, w), p))).collect()
}

fn by_synergy_then_pair(a: &(Edge, f64), b: &(Edge, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
}

/// Sorts the non-edges of `g0` by `(synergy, (u, w))` and puts the first
/// `floor((N - m0) / 2)` into `F-`. Synergies use `p0 = e(G0)/N`.
pub fn split_f(g0: &Graph) -> Result<FSplit> {
    let mut entries = non_edge_synergies(g0, g0.density());
    if entries.is_empty() {
        return Err(Error::Empty("G0 is complete; there are no non-edges to split".into()));
    }
    if entries.len() < 2 {
        return Err(param_err!("need at least two non-edges, found {}", entries.len()));
    }
    entries.sort_unstable_by(by_synergy_then_pair);
    let half = entries.len() / 2;
    let median = entries[half - 1].1;
    let ties_in_minus = entries[..half].iter().rev().take_while(|e| e.1 == median).count();
    let ties_in_plus = entries[half..].iter().take_while(|e| e.1 == median).count();
    let f_minus = entries[..half].iter().map(|e| e.0).collect();
    let f_plus = entries[half..].iter().map(|e| e.0).collect();
    Ok(FSplit {
        n: g0.n(),
        f_minus,
        f_plus,
        median_synergy: median,
        tie_policy: TiePolicy { rule: "lexicographic-pair".into(), ties_in_minus, ties_in_plus },
    })
}

/// Non-edges of `g0` with nonnegative synergy (at `p0 = e(G0)/N`).
pub fn f_plus_zero(g0: &Graph) -> Vec<Edge> {
    non_edge_synergies(g0, g0.density()).into_iter().filter(|e| e.1 >= 0.0).map(|e| e.0).collect()
}
