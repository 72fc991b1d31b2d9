//! Deterministic graph generators used by tests, benches and the CLI.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::graph::WeightedGraph;
use crate::rng::rng_from;

fn weight(rng: &mut crate::rng::Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// G(n, p) with weights uniform in `[w_lo, w_hi]`.
pub fn erdos_renyi(n: usize, p: f64, w_lo: f64, w_hi: f64, seed: u64) -> WeightedGraph {
    let mut rng = rng_from(seed, &[0xE2]);
    let mut raw = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p.clamp(0.0, 1.0)) {
                raw.push((u, v, weight(&mut rng, w_lo, w_hi)));
            }
        }
    }
    WeightedGraph::build(n, &raw).expect("generated edges are valid")
}

/// Connected graph with exactly `m` edges: a random spanning tree plus
/// uniformly chosen extra pairs. Requires `n - 1 <= m <= n(n-1)/2`.
pub fn random_connected(n: usize, m: usize, w_lo: f64, w_hi: f64, seed: u64) -> WeightedGraph {
    let max_m = n * n.saturating_sub(1) / 2;
    assert!(n >= 1 && m + 1 >= n && m <= max_m, "cannot place {m} edges on {n} nodes");
    let mut rng = rng_from(seed, &[0xC0]);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut pairs: HashSet<(usize, usize)> = HashSet::with_capacity(m);
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        let child = order[i];
        pairs.insert((parent.min(child), parent.max(child)));
    }
    if 2 * m <= max_m {
        while pairs.len() < m {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                pairs.insert((u.min(v), u.max(v)));
            }
        }
    } else {
        let mut rest: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|p| !pairs.contains(p))
            .collect();
        rest.shuffle(&mut rng);
        let need = m - pairs.len();
        pairs.extend(rest.into_iter().take(need));
    }
    let mut pairs: Vec<_> = pairs.into_iter().collect();
    pairs.sort_unstable();
    let raw: Vec<_> = pairs.into_iter().map(|(u, v)| (u, v, weight(&mut rng, w_lo, w_hi))).collect();
    WeightedGraph::build(n, &raw).expect("generated edges are valid")
}

pub fn path(n: usize, w: f64) -> WeightedGraph {
    let raw: Vec<_> = (1..n).map(|i| (i - 1, i, w)).collect();
    WeightedGraph::build(n, &raw).expect("valid path")
}

pub fn cycle(n: usize, w: f64) -> WeightedGraph {
    assert!(n >= 3);
    let raw: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, w)).collect();
    WeightedGraph::build(n, &raw).expect("valid cycle")
}

pub fn complete(n: usize, w: f64) -> WeightedGraph {
    let raw: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, w))).collect();
    WeightedGraph::build(n, &raw).expect("valid clique")
}

/// Star with center 0 and `leaves` leaves.
pub fn star(leaves: usize, w: f64) -> WeightedGraph {
    let raw: Vec<_> = (1..=leaves).map(|i| (0, i, w)).collect();
    WeightedGraph::build(leaves + 1, &raw).expect("valid star")
}

/// `rows x cols` grid, node `r * cols + c`.
pub fn grid(rows: usize, cols: usize, w: f64) -> WeightedGraph {
    let mut raw = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                raw.push((v, v + 1, w));
            }
            if r + 1 < rows {
                raw.push((v, v + cols, w));
            }
        }
    }
    WeightedGraph::build(rows * cols, &raw).expect("valid grid")
}

/// Two unit-weight `K_k` on nodes `0..k` and `k..2k`, joined by the single
/// edge `(k - 1, k)` of weight `bridge`.
pub fn bridged_cliques(k: usize, bridge: f64) -> WeightedGraph {
    let mut raw = Vec::new();
    for off in [0, k] {
        for u in 0..k {
            for v in u + 1..k {
                raw.push((off + u, off + v, 1.0));
            }
        }
    }
    raw.push((k - 1, k, bridge));
    WeightedGraph::build(2 * k, &raw).expect("valid bridged cliques")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(path(5, 1.0).m(), 4);
        assert_eq!(cycle(16, 1.0).m(), 16);
        assert_eq!(complete(8, 1.0).m(), 28);
        assert_eq!(star(8, 1.0).m(), 8);
        assert_eq!(grid(3, 4, 1.0).m(), 17);
        assert_eq!(bridged_cliques(16, 1.0).m(), 2 * 120 + 1);
    }

    #[test]
    fn random_connected_is_connected_with_exact_count() {
        for (n, m, seed) in [(10, 9, 1), (10, 45, 2), (50, 200, 3), (40, 700, 4)] {
            let g = random_connected(n, m, 1.0, 2.0, seed);
            assert_eq!(g.m(), m);
            assert!(g.is_connected());
            assert!(g.edges().iter().all(|e| (1.0..=2.0).contains(&e.w)));
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(erdos_renyi(30, 0.2, 1.0, 2.0, 9), erdos_renyi(30, 0.2, 1.0, 2.0, 9));
        assert_ne!(erdos_renyi(30, 0.2, 1.0, 2.0, 9), erdos_renyi(30, 0.2, 1.0, 2.0, 10));
    }
}
