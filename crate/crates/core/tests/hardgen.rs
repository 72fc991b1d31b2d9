use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;
use sparsekit::hardgen::{
    audit_sparsifier_recovery, b_of_x, build_hidden_graph, gen_b_eps, gen_valid_input, matching_edges, HardgenError,
    HiddenInput,
};
use sparsekit::{refined_sparsify, AdjacencyAccess, SparsifyConfig, WeightedGraph};

#[test]
fn b_eps_counts() {
    let g = gen_b_eps(0.25, 3).unwrap();
    assert_eq!((g.n(), g.m()), (32, 128));
    for v in 0..16 {
        assert_eq!(g.degree(v), 8);
        assert!(g.neighbors(v).iter().all(|nb| nb.node >= 16));
    }
    let small = gen_b_eps(0.5, 1).unwrap();
    assert_eq!((small.n(), small.m()), (8, 8));
    assert!(matches!(gen_b_eps(1.0, 1), Err(HardgenError::BadEpsilon(_))));
    assert!(matches!(gen_b_eps(0.3, 1), Err(HardgenError::BadEpsilon(_))));
}

#[test]
fn valid_input_counts_and_determinism() {
    let x = gen_valid_input(64, 512, 0.25, 9).unwrap();
    assert!(x.is_valid());
    // copies * rows * (c / 2) nonzero strings, one bit each
    let expected = x.copies() * x.c * (x.c / 2);
    assert_eq!(x.nonzero_strings(), expected);
    assert_eq!(x.bits.iter().filter(|&&b| b).count(), expected);
    assert_eq!(gen_valid_input(64, 512, 0.25, 9).unwrap(), x);
    assert_ne!(gen_valid_input(64, 512, 0.25, 10).unwrap(), x);
}

#[test]
fn small_instance_parameters() {
    let x = gen_valid_input(8, 16, std::f64::consts::FRAC_1_SQRT_2, 1).unwrap();
    assert_eq!((x.copies(), x.c, x.string_len()), (2, 2, 2));
    for k in 0..2 {
        for i in 0..2 {
            assert_eq!((0..2).filter(|&j| x.string_nonzero(k, i, j)).count(), 1);
        }
    }
}

#[test]
fn shape_violations_are_rejected() {
    let err = |r: Result<HiddenInput, HardgenError>| match r {
        Err(HardgenError::BadShape(s)) => s,
        other => panic!("expected BadShape, got {other:?}"),
    };
    assert!(!err(gen_valid_input(60, 512, 0.25, 1)).is_empty());
    assert!(!err(gen_valid_input(64, 2048, 0.25, 1)).is_empty());
    assert!(gen_valid_input(64, 500, 0.25, 1).is_err());
}

#[test]
fn matchings_partition_the_bipartite_graph() {
    let (n, m) = (16, 32);
    let left = 2 * m / n;
    let mut seen = HashSet::new();
    for j in 0..n / 2 {
        let mj = matching_edges(j, m, n).unwrap();
        assert_eq!(mj.len(), left);
        let lefts: HashSet<_> = mj.iter().map(|e| e.0).collect();
        let rights: HashSet<_> = mj.iter().map(|e| e.1).collect();
        assert_eq!((lefts.len(), rights.len()), (left, left));
        for e in mj {
            assert!(e.0 < left && e.1 < n / 2);
            assert!(seen.insert(e), "{e:?} repeated");
        }
    }
    assert_eq!(seen.len(), left * n / 2);
    assert_eq!(matching_edges(0, m, n).unwrap(), (0..left).map(|i| (i, i)).collect::<Vec<_>>());
    assert!(matching_edges(n / 2, m, n).is_err());
}

fn degree_sequence(g: &WeightedGraph) -> Vec<usize> {
    (0..g.n()).map(|v| g.degree(v)).collect()
}

#[test]
fn hidden_graph_shape_is_oblivious() {
    let (n, m) = (64, 512);
    let a = build_hidden_graph(gen_valid_input(n, m, 0.25, 1).unwrap()).unwrap();
    let b = build_hidden_graph(gen_valid_input(n, m, 0.25, 2).unwrap()).unwrap();
    let (ga, gb) = (a.materialize().unwrap(), b.materialize().unwrap());
    assert_eq!((ga.m(), gb.m()), (2 * m, 2 * m));
    assert!(ga.n() <= 2 * n);
    assert_ne!(ga, gb);
    assert_eq!(degree_sequence(&ga), degree_sequence(&gb));
    for v in 0..a.node_count() {
        assert_eq!(a.degree(v), ga.degree(v));
    }
}

#[test]
fn only_b_of_x_carries_weight() {
    let x = gen_valid_input(64, 512, 0.25, 5).unwrap();
    let g = build_hidden_graph(x.clone()).unwrap().materialize().unwrap();
    let positive: HashSet<_> = g.edges().iter().filter(|e| e.w > 0.0).map(|e| (e.u, e.v)).collect();
    let b: HashSet<_> = b_of_x(&x).into_iter().collect();
    assert_eq!(positive, b);
    assert!(g.edges().iter().all(|e| e.w == 0.0 || e.w == 1.0));
}

#[test]
fn neighbor_queries_read_one_bit_each() {
    let h = build_hidden_graph(gen_valid_input(64, 512, 0.25, 7).unwrap()).unwrap();
    let g = h.materialize().unwrap();
    let mut lists: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    let mut queries = 0u64;
    for v in 0..h.node_count() {
        for k in 0..h.degree(v) {
            let nb = h.neighbor(v, k);
            queries += 1;
            lists.entry(v).or_default().push((nb.node, nb.weight));
        }
    }
    assert_eq!(h.x_lookups(), queries);
    for (v, mut list) in lists {
        let mut want: Vec<_> = g.neighbors(v).iter().map(|nb| (nb.node, nb.weight)).collect();
        list.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(list, want, "node {v}");
    }
    h.reset_lookups();
    for q in 0..1000usize {
        let v = q * 7 % h.node_count();
        h.neighbor(v, q % h.degree(v));
    }
    assert!(h.x_lookups() <= 1000);
    let _ = h.degree(3);
    assert!(h.x_lookups() <= 1000);
}

#[test]
fn audit_extremes() {
    let x = gen_valid_input(64, 512, 0.25, 3).unwrap();
    let n_nodes = build_hidden_graph(x.clone()).unwrap().node_count();
    let full: Vec<_> = b_of_x(&x).into_iter().map(|(u, v)| (u, v, 1.0)).collect();
    let b = WeightedGraph::build(n_nodes, &full).unwrap();
    assert_eq!(audit_sparsifier_recovery(&x, &b), 1.0);
    let empty = WeightedGraph::build(n_nodes, &[]).unwrap();
    assert_eq!(audit_sparsifier_recovery(&x, &empty), 0.0);
}

#[test]
fn sparsifier_recovery_is_recorded() {
    let x = gen_valid_input(64, 512, 0.25, 4).unwrap();
    let g = build_hidden_graph(x.clone()).unwrap().materialize().unwrap();
    let cfg = SparsifyConfig { sample_c: 1.0, ..SparsifyConfig::default() };
    let h = refined_sparsify(&g, 0.5, 4, &cfg).unwrap().to_graph(&g);
    let fraction = audit_sparsifier_recovery(&x, &h);
    println!("recovered fraction {fraction:.3} with {} of {} edges", h.m(), g.m());
    assert!((0.0..=1.0).contains(&fraction));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn valid_inputs_build_simple_graphs(seed in any::<u64>()) {
        for (n, m, eps) in [(64, 512, 0.25), (32, 128, 0.5), (16, 32, std::f64::consts::FRAC_1_SQRT_2)] {
            let x = gen_valid_input(n, m, eps, seed).unwrap();
            prop_assert!(x.is_valid());
            let g = build_hidden_graph(x).unwrap().materialize().unwrap();
            prop_assert_eq!(g.m(), 2 * m);
        }
    }
}
