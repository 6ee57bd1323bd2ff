use trilow_core::accounting::{exact_class_expectations, t_class_profile};
use trilow_core::conditioning::{check_quasirandom_with_split, hypergeom_log_pmf, sample_conditioned_g1};
use trilow_core::distribution::{vertex_ks_reports, Verdict};
use trilow_core::graph::{count_triangles_by_class, pair_count};
use trilow_core::params::epsilon;
use trilow_core::sample::{derive_seed, sample_gnm, two_phase_split};
use trilow_core::synergy::split_f;
use trilow_core::{ProcessParams, VertexSet};

#[test]
fn edges_inside_a_fixed_set_are_hypergeometric() {
    // e(G(6, 7)[U]) for |U| = 4 is Hyp(15, 7, 6).
    let (n, m) = (6, 7);
    let u = VertexSet::from_vertices(n, 0..4).unwrap();
    let trials = 200_000u64;
    let mut hist = [0u64; 7];
    for s in 0..trials {
        let g = sample_gnm(n, m, derive_seed(61, s)).unwrap();
        hist[g.edge_count_within(&u)] += 1;
    }
    for (k, &c) in hist.iter().enumerate() {
        let p = hypergeom_log_pmf(15, 7, 6, k as u64).unwrap().exp();
        let se = (p * (1.0 - p) / trials as f64).sqrt().max(1e-9);
        let f = c as f64 / trials as f64;
        assert!((f - p).abs() <= 5.0 * se, "k={k}: {f} vs {p}");
    }
}

#[test]
fn first_phase_is_quasirandom_at_moderate_size() {
    let n = 400;
    let params = ProcessParams::new(n, pair_count(n) / 2, 0.1, 0.0, 0.3, 0.1).unwrap();
    for t in 0..20 {
        let (g0, g1) = two_phase_split(&params, derive_seed(62, t)).unwrap();
        assert_eq!(g1.m(), params.m1());
        let split = split_f(&g0).unwrap();
        split.check_against(&g0).unwrap();
        let rep = check_quasirandom_with_split(&g0, &split, 1.0, derive_seed(63, t)).unwrap();
        assert!(rep.passes(), "trial {t}: {:?}", rep.flags);
    }
}

#[test]
fn synergy_vectors_are_close_to_normal() {
    let n = 600;
    let eps = epsilon(n);
    for t in 0..3 {
        let g = sample_gnm(n, pair_count(n) / 2, derive_seed(64, t)).unwrap();
        for (v, r) in vertex_ks_reports(&g, eps, None).unwrap() {
            let r = r.unwrap_or_else(|| panic!("vertex {v} has no non-neighbours"));
            assert_eq!(r.verdict, Verdict::Close, "vertex {v}: d = {}", r.distance);
        }
    }
}

#[test]
fn conditioned_completion_is_consistent() {
    let n = 150;
    let params = ProcessParams::new(n, pair_count(n) / 2, 0.2, 0.0, 0.3, 0.15).unwrap();
    let g0 = sample_gnm(n, params.m0(), 65).unwrap();
    let split = split_f(&g0).unwrap();
    let minus = split.minus_graph();
    for t in 0..10 {
        let g1 = sample_conditioned_g1(&split, params.m1(), params.alpha, derive_seed(66, t)).unwrap();
        assert_eq!(g1.m(), params.m1());
        assert!(g0.is_edge_disjoint(&g1));
        let in_minus = g1.edges().filter(|&(u, w)| minus.has_edge(u, w)).count();
        assert_eq!(in_minus, params.k_minus());
        let c = count_triangles_by_class(&g0, &g1).unwrap();
        let union = g0.disjoint_union(&g1).unwrap();
        assert_eq!(c.total(), trilow_core::graph::count_triangles(&union));
    }
    let exp = exact_class_expectations(&g0, &split, params.m1(), params.alpha).unwrap();
    let prof = t_class_profile(&g0, &split).unwrap();
    assert!(prof.partition_ok() && prof.tomono_ok());
    assert!(exp.t03 > 0.0 && exp.t12 > 0.0 && exp.t21 > 0.0);
}
