//! Simple undirected graphs stored as packed adjacency bit rows.
//!
//! Every row is `ceil(n / 64)` words, so degree, codegree and induced edge
//! counts are popcounts over word-wise intersections. Bits past `n` in the
//! last word are always zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{param_err, Error, Result};

/// An unordered pair `(u, w)` stored with `u < w`.
pub type Edge = (usize, usize);

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Number of unordered pairs on `n` vertices.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Colexicographic index of the pair `{u, w}`: `w(w-1)/2 + u` for `u < w`.
#[inline]
pub fn pair_index(u: usize, w: usize) -> usize {
    let (a, b) = if u < w { (u, w) } else { (w, u) };
    b * (b - 1) / 2 + a
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(idx: usize) -> Edge {
    // w is the largest integer with w(w-1)/2 <= idx
    let mut w = ((1.0 + crate::math::sqrt(1.0 + 8.0 * idx as f64)) / 2.0) as usize;
    while w * (w - 1) / 2 > idx {
        w -= 1;
    }
    while (w + 1) * w / 2 <= idx {
        w += 1;
    }
    (idx - w * (w - 1) / 2, w)
}


/// A set of vertices of an `n`-vertex graph, as a bitset compatible with
/// graph rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        Self { n, words: vec![0; words_for(n)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(n: usize, vertices: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for v in vertices {
            if v >= n {
                return Err(param_err!("vertex {v} out of range for n = {n}"));
            }
            s.insert(v);
        }
        Ok(s)
    }

    fn from_words(n: usize, words: Vec<u64>) -> Self {
        Self { n, words }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.words[v / WORD] |= 1u64 << (v % WORD);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.words[v / WORD] &= !(1u64 << (v % WORD));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / WORD] >> (v % WORD) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Vertices in ascending order.
    pub fn iter(&self) -> BitIter<'_> {
        BitIter::new(&self.words)
    }
}

/// Ascending iterator over the set bits of a word slice.
#[derive(Debug)]
pub struct BitIter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> BitIter<'a> {
    fn new(words: &'a [u64]) -> Self {
        Self { words, idx: 0, cur: words.first().copied().unwrap_or(0) }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + bit);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

#[inline]
fn and_popcount(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

/// Simple undirected graph on vertices `0..n`.
///
/// Immutable once handed out by the samplers; `Send + Sync` so trial workers
/// can share it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        Self { n, words, rows: vec![0; n * words], m: 0 }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for w in 1..n {
            for u in 0..w {
                g.set(u, w);
            }
        }
        g.m = pair_count(n);
        g
    }

    /// Builds a graph from an edge list. Self-loops, out-of-range vertices and
    /// repeated pairs are rejected.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Self::empty(n);
        for (u, w) in edges {
            if !g.add_edge(u, w)? {
                return Err(param_err!("duplicate edge {u}-{w}"));
            }
        }
        Ok(g)
    }

    /// Builds a graph from colex pair indices, assumed distinct and `< N`.
    pub(crate) fn from_pair_indices(n: usize, indices: &[usize]) -> Self {
        let mut g = Self::empty(n);
        for &idx in indices {
            let (u, w) = pair_from_index(idx);
            g.set(u, w);
        }
        g.m = indices.len();
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge count.
    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Edge density `e(G) / N`; zero when `n < 2`.
    pub fn density(&self) -> f64 {
        let big_n = pair_count(self.n);
        if big_n == 0 {
            0.0
        } else {
            self.m as f64 / big_n as f64
        }
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    fn set(&mut self, u: usize, w: usize) {
        self.rows[u * self.words + w / WORD] |= 1u64 << (w % WORD);
        self.rows[w * self.words + u / WORD] |= 1u64 << (u % WORD);
    }

    #[inline]
    fn clear(&mut self, u: usize, w: usize) {
        self.rows[u * self.words + w / WORD] &= !(1u64 << (w % WORD));
        self.rows[w * self.words + u / WORD] &= !(1u64 << (u % WORD));
    }

    fn check_pair(&self, u: usize, w: usize) -> Result<()> {
        if u >= self.n || w >= self.n {
            return Err(param_err!("vertex out of range: {u}-{w} with n = {}", self.n));
        }
        if u == w {
            return Err(param_err!("self-loop at {u}"));
        }
        Ok(())
    }

    /// Adds `uw`; returns `false` if it was already present.
    pub fn add_edge(&mut self, u: usize, w: usize) -> Result<bool> {
        self.check_pair(u, w)?;
        if self.has_edge(u, w) {
            return Ok(false);
        }
        self.set(u, w);
        self.m += 1;
        Ok(true)
    }

    /// Removes `uw`; returns `false` if it was absent.
    pub fn remove_edge(&mut self, u: usize, w: usize) -> Result<bool> {
        self.check_pair(u, w)?;
        if !self.has_edge(u, w) {
            return Ok(false);
        }
        self.clear(u, w);
        self.m -= 1;
        Ok(true)
    }

    #[inline]
    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        u < self.n && w < self.n && self.row(u)[w / WORD] >> (w % WORD) & 1 == 1
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    /// `|N(u) ∩ N(w)|`.
    #[inline]
    pub fn codegree(&self, u: usize, w: usize) -> usize {
        and_popcount(self.row(u), self.row(w))
    }

    pub fn neighbors(&self, u: usize) -> BitIter<'_> {
        BitIter::new(self.row(u))
    }

    pub fn neighborhood(&self, u: usize) -> VertexSet {
        VertexSet::from_words(self.n, self.row(u).to_vec())
    }

    /// `V \ (N(u) ∪ {u})`.
    pub fn non_neighborhood(&self, u: usize) -> VertexSet {
        let mut words: Vec<u64> = self.row(u).iter().map(|w| !w).collect();
        mask_tail(&mut words, self.n);
        let mut s = VertexSet::from_words(self.n, words);
        s.remove(u);
        s
    }

    /// Edges `(u, w)` with `u < w`, ordered by `u` then `w`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&w| w > u).map(move |w| (u, w)))
    }

    /// Non-adjacent pairs `(u, w)` with `u < w`, lexicographic.
    pub fn non_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n).flat_map(move |u| ((u + 1)..self.n).filter(move |&w| !self.has_edge(u, w)).map(move |w| (u, w)))
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            let src = self.row(u);
            let dst = &mut g.rows[u * g.words..(u + 1) * g.words];
            for (d, s) in dst.iter_mut().zip(src) {
                *d = !s;
            }
            mask_tail(dst, self.n);
            dst[u / WORD] &= !(1u64 << (u % WORD));
        }
        g.m = pair_count(self.n) - self.m;
        g
    }

    pub fn is_edge_disjoint(&self, other: &Graph) -> bool {
        self.n == other.n && self.rows.iter().zip(&other.rows).all(|(a, b)| a & b == 0)
    }

    /// `self ∪ other`; fails unless both are on the same vertex set and
    /// edge-disjoint.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph> {
        if self.n != other.n {
            return Err(Error::Contract(alloc::format!("vertex counts differ: {} vs {}", self.n, other.n)));
        }
        if !self.is_edge_disjoint(other) {
            return Err(Error::Contract("edge sets overlap".into()));
        }
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect();
        Ok(Graph { n: self.n, words: self.words, rows, m: self.m + other.m })
    }

    /// Whether every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    /// `e(G[U])`.
    pub fn edge_count_within(&self, set: &VertexSet) -> usize {
        let s = set.words();
        set.iter().map(|x| and_popcount(self.row(x), s)).sum::<usize>() / 2
    }

    /// `e(G[U, V])` for disjoint `U`, `V`.
    pub fn edge_count_between(&self, left: &VertexSet, right: &VertexSet) -> usize {
        let r = right.words();
        left.iter().map(|x| and_popcount(self.row(x), r)).sum()
    }

    /// `|N(u) ∩ U|`.
    pub fn degree_into(&self, u: usize, set: &VertexSet) -> usize {
        and_popcount(self.row(u), set.words())
    }
}

fn mask_tail(words: &mut [u64], n: usize) {
    let rem = n % WORD;
    if rem != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

/// Degrees and codegree of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalCounts {
    pub d_u: usize,
    pub d_w: usize,
    pub codeg: usize,
}

pub fn local_counts(g: &Graph, u: usize, w: usize) -> Result<LocalCounts> {
    g.check_pair(u, w)?;
    Ok(LocalCounts { d_u: g.degree(u), d_w: g.degree(w), codeg: g.codegree(u, w) })
}

/// Number of common neighbours of `u` and `w` lying above `w` (for `u < w`),
/// i.e. triangles `u < w < x` through the pair.
#[inline]
fn upper_codegree(g: &Graph, u: usize, w: usize) -> usize {
    let start = (w + 1) / WORD;
    let (ru, rw) = (g.row(u), g.row(w));
    if start >= g.words {
        return 0;
    }
    let shift = (w + 1) % WORD;
    let first = ru[start] & rw[start] & (u64::MAX << shift);
    first.count_ones() as usize + and_popcount(&ru[start + 1..], &rw[start + 1..])
}

/// Exact number of triangles, `O(m n / 64)`.
pub fn count_triangles(g: &Graph) -> u64 {
    g.edges().map(|(u, w)| upper_codegree(g, u, w) as u64).sum()
}

/// `Σ_{uw ∈ E(host)} |N_a(u) ∩ N_b(w)|`, counting each pair once.
fn sum_codegree_over(host: &Graph, a: &Graph) -> u64 {
    host.edges().map(|(u, w)| a.codegree(u, w) as u64).sum()
}

/// Triangles of `G0 ∪ G1` grouped by how many of their edges come from `G1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TriangleClassCounts {
    /// Three edges in `G0`.
    pub t30: u64,
    /// Two in `G0`, one in `G1`.
    pub t21: u64,
    /// One in `G0`, two in `G1`.
    pub t12: u64,
    /// Three in `G1`.
    pub t03: u64,
}

impl TriangleClassCounts {
    pub fn total(&self) -> u64 {
        self.t30 + self.t21 + self.t12 + self.t03
    }
}

pub fn count_triangles_by_class(g0: &Graph, g1: &Graph) -> Result<TriangleClassCounts> {
    if g0.n != g1.n {
        return Err(Error::Contract(alloc::format!("vertex counts differ: {} vs {}", g0.n, g1.n)));
    }
    if !g0.is_edge_disjoint(g1) {
        return Err(Error::Contract("G0 and G1 share an edge".into()));
    }
    Ok(TriangleClassCounts {
        t30: count_triangles(g0),
        t21: sum_codegree_over(g1, g0),
        t12: sum_codegree_over(g0, g1),
        t03: count_triangles(g1),
    })
}

/// Triangles of the union of two edge-disjoint graphs `a`, `b`, indexed by
/// the number of their edges in `a`.
pub(crate) fn mixed_triangle_counts(a: &Graph, b: &Graph) -> [u64; 4] {
    [count_triangles(b), sum_codegree_over(a, b), sum_codegree_over(b, a), count_triangles(a)]
}
