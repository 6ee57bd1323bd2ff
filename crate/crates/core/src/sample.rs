//! Seeded samplers: `G(n,m)`, `G(n,p)`, the two-phase process and uniform
//! subsets.
//!
//! Every stochastic routine takes an explicit 64-bit seed. Trial seeds are
//! derived from a master seed with [`derive_seed`], a counter-based mix, so a
//! trial's randomness depends only on `(master, trial_id)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param_err, Result};
use crate::graph::{pair_count, Graph};
use crate::params::ProcessParams;

/// Generator used throughout: portable and reproducible across platforms.
pub type TrialRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `counter` under `master`.
pub fn derive_seed(master: u64, counter: u64) -> u64 {
    splitmix64(master ^ splitmix64(counter.wrapping_mul(0xD1B5_4A32_D192_ED03)))
}

/// Dense-array threshold for the partial shuffle: below this population a
/// plain vector is cheaper than the sparse map.
const DENSE_LIMIT: usize = 1 << 24;

/// First `k` entries of a uniformly random permutation of `0..population`,
/// in draw order (partial Fisher-Yates). Dense and sparse storage consume
/// the generator identically, so the output depends only on the RNG state.
pub fn partial_shuffle<R: Rng + ?Sized>(population: usize, k: usize, rng: &mut R) -> Vec<usize> {
    assert!(k <= population, "cannot draw {k} of {population}");
    let mut out = Vec::with_capacity(k);
    if population <= DENSE_LIMIT || 4 * k >= population {
        let mut a: Vec<usize> = (0..population).collect();
        for i in 0..k {
            let j = rng.gen_range(i..population);
            a.swap(i, j);
            out.push(a[i]);
        }
    } else {
        let mut moved: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..k {
            let j = rng.gen_range(i..population);
            let at_j = moved.get(&j).copied().unwrap_or(j);
            let at_i = moved.get(&i).copied().unwrap_or(i);
            moved.insert(j, at_i);
            out.push(at_j);
        }
    }
    out
}

/// Uniform `k`-subset of `items`, in draw order.
pub fn sample_subset<T: Copy, R: Rng + ?Sized>(items: &[T], k: usize, rng: &mut R) -> Result<Vec<T>> {
    if k > items.len() {
        return Err(param_err!("cannot draw {k} items from {}", items.len()));
    }
    Ok(partial_shuffle(items.len(), k, rng).into_iter().map(|i| items[i]).collect())
}

/// Uniform graph on `n` vertices with exactly `m` edges.
pub fn sample_gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let big_n = pair_count(n);
    if m > big_n {
        return Err(param_err!("m = {m} exceeds N = {big_n}"));
    }
    let mut rng = rng_from_seed(seed);
    Ok(Graph::from_pair_indices(n, &partial_shuffle(big_n, m, &mut rng)))
}

/// `G(n,p)`: each pair independently with probability `p`.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(param_err!("p = {p} outside [0,1]"));
    }
    let mut rng = rng_from_seed(seed);
    let chosen: Vec<usize> = (0..pair_count(n)).filter(|_| rng.gen_bool(p)).collect();
    Ok(Graph::from_pair_indices(n, &chosen))
}

/// First `m0` and the next `m1` edges of the uniform random graph process,
/// as the edge-disjoint pair `(G0, G1)`.
pub fn two_phase_split(params: &ProcessParams, seed: u64) -> Result<(Graph, Graph)> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let order = partial_shuffle(params.pairs(), params.m, &mut rng);
    let (first, second) = order.split_at(params.m0());
    Ok((Graph::from_pair_indices(params.n, first), Graph::from_pair_indices(params.n, second)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::count_triangles;
    use std::vec;
    use std::collections::HashMap;

    #[test]
    fn gnm_trivial_cases() {
        let k3 = sample_gnm(3, 3, 7).unwrap();
        assert_eq!(count_triangles(&k3), 1);
        assert_eq!(sample_gnm(5, 0, 7).unwrap().m(), 0);
        let k4 = sample_gnm(4, 6, 1).unwrap();
        assert_eq!(k4, Graph::complete(4));
        assert_eq!(count_triangles(&k4), 4);
        assert!(sample_gnm(4, 7, 1).is_err());
    }

    #[test]
    fn gnp_trivial_cases() {
        assert_eq!(sample_gnp(10, 0.0, 3).unwrap().m(), 0);
        assert_eq!(sample_gnp(10, 1.0, 3).unwrap(), Graph::complete(10));
        assert!(sample_gnp(10, 1.5, 3).is_err());
        assert!(sample_gnp(10, -0.1, 3).is_err());
    }

    #[test]
    fn determinism() {
        assert_eq!(sample_gnm(50, 300, 11).unwrap(), sample_gnm(50, 300, 11).unwrap());
        assert_ne!(sample_gnm(50, 300, 11).unwrap(), sample_gnm(50, 300, 12).unwrap());
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn sparse_and_dense_shuffles_agree() {
        // Force the sparse path by exceeding DENSE_LIMIT with a small draw.
        let pop = DENSE_LIMIT + 5;
        let mut r1 = rng_from_seed(9);
        let sparse = partial_shuffle(pop, 40, &mut r1);
        let mut r2 = rng_from_seed(9);
        let mut a: Vec<usize> = (0..pop).collect();
        let dense: Vec<usize> = (0..40)
            .map(|i| {
                let j = r2.gen_range(i..pop);
                a.swap(i, j);
                a[i]
            })
            .collect();
        assert_eq!(sparse, dense);
    }

    #[test]
    fn two_phase_edge_budget() {
        let p = ProcessParams::new(30, 200, 0.25, 0.0, 0.1, 0.0).unwrap();
        for seed in 0..20 {
            let (g0, g1) = two_phase_split(&p, seed).unwrap();
            assert_eq!(g0.m(), p.m0());
            assert_eq!(g1.m(), p.m1());
            assert!(g0.is_edge_disjoint(&g1));
        }
        let p = ProcessParams::new(30, 200, 0.0, 0.0, 0.1, 0.0).unwrap();
        let (g0, g1) = two_phase_split(&p, 5).unwrap();
        assert_eq!(g1.m(), 0);
        assert_eq!(g0, sample_gnm(30, 200, 5).unwrap());
    }

    #[test]
    fn gnp_mean_edge_count() {
        // N = 4950, p = 1/2: mean 2475, sd of one draw sqrt(N p q) ~ 35.2;
        // the mean of 10^4 draws must sit within 3 sd / 100.
        let trials = 10_000;
        let total: usize = (0..trials).map(|s| sample_gnp(100, 0.5, s).unwrap().m()).sum();
        let mean = total as f64 / trials as f64;
        let tol = 3.0 * (4950.0f64 * 0.25).sqrt() * 1e-2;
        assert!((mean - 2475.0).abs() <= tol, "mean {mean}");
    }

    #[test]
    fn gnm_uniform_over_all_three_edge_graphs() {
        // 20 graphs, each with probability 1/20; 5 standard errors.
        let trials = 1_000_000u64;
        let mut counts: HashMap<Vec<(usize, usize)>, u64> = HashMap::new();
        for s in 0..trials {
            let g = sample_gnm(4, 3, derive_seed(17, s)).unwrap();
            *counts.entry(g.edges().collect()).or_default() += 1;
        }
        assert_eq!(counts.len(), 20);
        let se = (0.05f64 * 0.95 / trials as f64).sqrt();
        for (_, c) in counts {
            let f = c as f64 / trials as f64;
            assert!((f - 0.05).abs() <= 5.0 * se, "frequency {f}");
        }
    }

    #[test]
    fn two_phase_law_matches_enumeration() {
        // n = 4, m = 4, eta = 0.5 -> (G0, G1) ranges over ordered pairs of
        // disjoint 2-subsets of the 6 pairs. Enumerating the 6*5*4*3 ordered
        // edge sequences gives each of the 90 outcomes 4 sequences.
        let mut exact: HashMap<(Vec<usize>, Vec<usize>), u32> = HashMap::new();
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    for d in 0..6 {
                        let s = [a, b, c, d];
                        if (0..4).any(|i| (i + 1..4).any(|j| s[i] == s[j])) {
                            continue;
                        }
                        let mut g0 = vec![a, b];
                        let mut g1 = vec![c, d];
                        g0.sort();
                        g1.sort();
                        *exact.entry((g0, g1)).or_default() += 1;
                    }
                }
            }
        }
        assert_eq!(exact.len(), 90);
        assert!(exact.values().all(|&c| c == 4));

        let params = ProcessParams::new(4, 4, 0.5, 0.0, 0.3, 0.0).unwrap();
        let trials = 200_000u64;
        let mut seen: HashMap<(Vec<usize>, Vec<usize>), u64> = HashMap::new();
        for s in 0..trials {
            let (g0, g1) = two_phase_split(&params, derive_seed(3, s)).unwrap();
            let key = |g: &Graph| {
                let mut v: Vec<usize> = g.edges().map(|(u, w)| crate::graph::pair_index(u, w)).collect();
                v.sort();
                v
            };
            *seen.entry((key(&g0), key(&g1))).or_default() += 1;
        }
        assert_eq!(seen.len(), 90);
        let p = 1.0 / 90.0;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        for (k, c) in seen {
            assert!(exact.contains_key(&k));
            let f = c as f64 / trials as f64;
            assert!((f - p).abs() <= 5.0 * se, "frequency {f}");
        }
    }
}
