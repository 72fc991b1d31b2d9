//! Thorup-Zwick spanners and spanner packings.
//!
//! Distances are under traversal cost `1/w`; zero-weight edges are
//! forbidden. A `(2k-1)`-spanner keeps, for every center `v` of level `i`,
//! a shortest-path tree of its cluster `C(v) = {w : d(w, v) < d(w, A_i)}`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng as _;
use rayon::prelude::*;

use crate::graph::{AdjacencyAccess, Neighbor};
use crate::oracle::{grover_cost, CostLedger};
use crate::paths::Cost;
use crate::rng::{derive_seed, rng_from, STREAM_PACKING, STREAM_SPANNER};

/// Resampling attempts for a level that drops no node.
const LEVEL_RETRIES: usize = 10;

/// Default number of levels: `ceil(log2 n)`, at least 1.
pub fn default_levels(n: usize) -> usize {
    (n.max(2) as f64).log2().ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spanner {
    /// Sorted edge ids of the underlying graph.
    pub edges: Vec<usize>,
    pub k: usize,
    pub ledger: CostLedger,
}

impl Spanner {
    pub fn stretch(&self) -> usize {
        2 * self.k - 1
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Builds a `(2k-1)`-spanner of `g`.
pub fn build_spanner<A: AdjacencyAccess + Sync>(g: &A, k: usize, seed: u64) -> Spanner {
    assert!(k >= 1, "spanner needs k >= 1");
    let n = g.node_count();
    let mut ledger = CostLedger::default();
    if n == 0 {
        return Spanner { edges: Vec::new(), k, ledger };
    }

    // top[v] = largest i with v in A_i
    let mut top = vec![0usize; n];
    let mut rng = rng_from(seed, &[STREAM_SPANNER]);
    let p = (n as f64).powf(-1.0 / k as f64);
    for i in 1..k {
        let prev: Vec<usize> = (0..n).filter(|&v| top[v] == i - 1).collect();
        if prev.is_empty() {
            break;
        }
        let mut kept = Vec::new();
        for _ in 0..LEVEL_RETRIES {
            kept = prev.iter().copied().filter(|_| rng.random_bool(p)).collect();
            if kept.len() < prev.len() {
                break;
            }
        }
        for v in kept {
            top[v] = i;
        }
    }

    let mut keep = vec![false; g.edge_count()];
    for i in 1..=k {
        let centers: Vec<usize> = (0..n).filter(|&v| top[v] == i - 1).collect();
        if centers.is_empty() {
            continue;
        }
        let sources: Vec<usize> = if i < k { (0..n).filter(|&v| top[v] >= i).collect() } else { Vec::new() };
        let bound = if sources.is_empty() {
            vec![f64::INFINITY; n]
        } else {
            let (d, scanned, settled) = multi_source(g, &sources);
            ledger.add_classical((scanned + settled) as u64);
            // marked entries are the edges that reach a new node
            ledger.add_quantum(grover_cost(scanned, settled - sources.len()));
            d
        };

        let grown: Vec<(Vec<usize>, usize, usize)> = centers
            .par_iter()
            .map_init(|| Scratch::new(n), |s, &v| s.cluster_tree(g, v, &bound))
            .collect();
        for (edges, scanned, settled) in grown {
            ledger.add_classical((scanned + settled) as u64);
            ledger.add_quantum(grover_cost(scanned, settled - 1));
            for e in edges {
                keep[e] = true;
            }
        }
    }
    let edges = (0..keep.len()).filter(|&e| keep[e]).collect();
    Spanner { edges, k, ledger }
}

/// Distances to the nearest source, as from a virtual root joined to every
/// source at zero cost. Returns `(dist, entries scanned, nodes settled)`.
fn multi_source<A: AdjacencyAccess>(g: &A, sources: &[usize]) -> (Vec<f64>, usize, usize) {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Reverse((Cost(0.0), s)));
    }
    let (mut scanned, mut settled) = (0, 0);
    while let Some(Reverse((Cost(d), x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        settled += 1;
        let deg = g.degree(x);
        scanned += deg;
        for j in 0..deg {
            let nb = g.neighbor(x, j);
            if nb.weight > 0.0 {
                let nd = d + 1.0 / nb.weight;
                if nd < dist[nb.node] {
                    dist[nb.node] = nd;
                    heap.push(Reverse((Cost(nd), nb.node)));
                }
            }
        }
    }
    (dist, scanned, settled)
}

/// Per-thread buffers for cluster growth, reset by stamping.
struct Scratch {
    stamp: u32,
    seen: Vec<u32>,
    settled: Vec<u32>,
    dist: Vec<f64>,
    heap: BinaryHeap<Reverse<(Cost, usize, usize)>>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { stamp: 0, seen: vec![0; n], settled: vec![0; n], dist: vec![0.0; n], heap: BinaryHeap::new() }
    }

    /// Shortest-path tree of `C(v)`: a node `y` is entered only while its
    /// tentative distance stays strictly below `bound[y]`, which is the same
    /// as giving every edge leaving the cluster weight zero.
    fn cluster_tree<A: AdjacencyAccess>(&mut self, g: &A, v: usize, bound: &[f64]) -> (Vec<usize>, usize, usize) {
        self.stamp += 1;
        let s = self.stamp;
        let mut tree = Vec::new();
        let (mut scanned, mut settled) = (0, 0);
        self.heap.clear();
        self.seen[v] = s;
        self.dist[v] = 0.0;
        // edge id usize::MAX marks the root
        self.heap.push(Reverse((Cost(0.0), usize::MAX, v)));
        while let Some(Reverse((Cost(d), e, x))) = self.heap.pop() {
            if self.settled[x] == s {
                continue;
            }
            self.settled[x] = s;
            settled += 1;
            if e != usize::MAX {
                tree.push(e);
            }
            let deg = g.degree(x);
            scanned += deg;
            for j in 0..deg {
                let Neighbor { node: y, weight, edge } = g.neighbor(x, j);
                if weight <= 0.0 || self.settled[y] == s {
                    continue;
                }
                let nd = d + 1.0 / weight;
                if nd < bound[y] && (self.seen[y] != s || nd <= self.dist[y]) {
                    self.seen[y] = s;
                    self.dist[y] = nd;
                    self.heap.push(Reverse((Cost(nd), edge, y)));
                }
            }
        }
        (tree, scanned, settled)
    }
}

/// Zeroes the weight of removed edges.
pub struct Residual<'a, A> {
    base: &'a A,
    removed: &'a [bool],
}

impl<'a, A: AdjacencyAccess> Residual<'a, A> {
    pub fn new(base: &'a A, removed: &'a [bool]) -> Self {
        assert_eq!(removed.len(), base.edge_count());
        Residual { base, removed }
    }
}

impl<A: AdjacencyAccess> AdjacencyAccess for Residual<'_, A> {
    fn node_count(&self) -> usize {
        self.base.node_count()
    }
    fn edge_count(&self) -> usize {
        self.base.edge_count()
    }
    #[inline]
    fn degree(&self, v: usize) -> usize {
        self.base.degree(v)
    }
    #[inline]
    fn neighbor(&self, v: usize, k: usize) -> Neighbor {
        let nb = self.base.neighbor(v, k);
        if self.removed[nb.edge] {
            Neighbor { weight: 0.0, ..nb }
        } else {
            nb
        }
    }
}

/// Edge-disjoint spanners `H_1..H_r`, each of the residual left by the
/// previous ones. Only the nonempty prefix is stored: once a residual has no
/// positive-weight edge every later spanner is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SpannerPacking {
    pub spanners: Vec<Spanner>,
    pub requested: usize,
    pub k: usize,
    pub ledger: CostLedger,
}

impl SpannerPacking {
    /// Number of spanners, including the trailing empty ones.
    pub fn len(&self) -> usize {
        self.requested
    }

    pub fn is_empty(&self) -> bool {
        self.requested == 0
    }

    /// Edges of `H_j` (0-based); empty past the stored prefix.
    pub fn spanner_edges(&self, j: usize) -> &[usize] {
        self.spanners.get(j).map_or(&[], |s| s.edges.as_slice())
    }

    /// Whether the residual was exhausted before `requested` spanners.
    pub fn exhausted(&self) -> bool {
        self.spanners.len() < self.requested
    }

    /// Sorted union of all spanner edges.
    pub fn union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.spanners.iter().flat_map(|s| s.edges.iter().copied()).collect();
        all.sort_unstable();
        all
    }
}

/// Packs `r` spanners with `k` levels each.
pub fn spanner_packing<A: AdjacencyAccess + Sync>(g: &A, r: usize, k: usize, seed: u64) -> SpannerPacking {
    assert!(r >= 1, "packing needs r >= 1");
    let mut removed = vec![false; g.edge_count()];
    let mut spanners = Vec::new();
    let mut ledger = CostLedger::default();
    for j in 0..r {
        let residual = Residual::new(g, &removed);
        let h = build_spanner(&residual, k, derive_seed(seed, &[STREAM_PACKING, j as u64]));
        ledger.combine(&h.ledger);
        if h.is_empty() {
            break;
        }
        for &e in &h.edges {
            removed[e] = true;
        }
        spanners.push(h);
    }
    SpannerPacking { spanners, requested: r, k, ledger }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::WeightedGraph;

    #[test]
    fn triangle_k1_keeps_everything() {
        let g = gen::complete(3, 1.0);
        assert_eq!(build_spanner(&g, 1, 5).edges, vec![0, 1, 2]);
    }

    #[test]
    fn tree_packing() {
        let g = gen::random_connected(30, 29, 1.0, 3.0, 2);
        let p = spanner_packing(&g, 3, default_levels(30), 9);
        assert_eq!(p.spanner_edges(0).len(), 29);
        assert!(p.spanner_edges(1).is_empty());
        assert!(p.spanner_edges(2).is_empty());
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn zero_weight_edges_are_skipped() {
        let g = WeightedGraph::build(3, &[(0, 1, 1.0), (1, 2, 0.0)]).unwrap();
        assert_eq!(build_spanner(&g, 2, 1).edges, vec![0]);
    }

    #[test]
    fn deterministic() {
        let g = gen::erdos_renyi(60, 0.2, 1.0, 2.0, 1);
        assert_eq!(build_spanner(&g, 3, 4), build_spanner(&g, 3, 4));
    }

    #[test]
    fn default_levels_values() {
        assert_eq!(default_levels(1), 1);
        assert_eq!(default_levels(2), 1);
        assert_eq!(default_levels(3), 2);
        assert_eq!(default_levels(256), 8);
        assert_eq!(default_levels(257), 9);
    }
}
