//! Shortest-path trees under traversal cost `1/w`.
//!
//! Both tree builders grow the tree by repeatedly adding the border edge of
//! least `(cost, edge id)`, where `cost(u, v) = dist(u) + 1/w(u, v)`. With
//! the same key and the same floating-point expression they produce
//! identical trees, not just identical distances.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use crate::graph::{AdjacencyAccess, WeightedGraph};
use crate::oracle::QueryOracle;

/// Total order on costs; all costs are nonnegative or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost(pub f64);

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[inline]
pub fn edge_cost(w: f64) -> f64 {
    if w > 0.0 {
        1.0 / w
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPathTree {
    pub root: usize,
    /// `(parent node, edge id)` for every reached node except the root.
    pub parent: Vec<Option<(usize, usize)>>,
    /// Distance from the root; `+inf` when unreached.
    pub dist: Vec<f64>,
    /// Nodes in the order they joined the tree.
    pub order: Vec<usize>,
}

impl ShortestPathTree {
    fn start(n: usize, root: usize) -> Self {
        let mut dist = vec![f64::INFINITY; n];
        dist[root] = 0.0;
        ShortestPathTree { root, parent: vec![None; n], dist, order: vec![root] }
    }

    pub fn reached(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }

    /// Edge ids of the tree.
    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.parent.iter().filter_map(|p| p.map(|(_, e)| e))
    }
}

/// Dijkstra from `v0` on an explicit graph.
pub fn dijkstra(g: &WeightedGraph, v0: usize) -> ShortestPathTree {
    dijkstra_with(&QueryOracle::new(g), v0)
}

/// Dijkstra through a counting oracle. Zero-weight edges are never
/// traversed, so the tree spans exactly the positive-weight component.
pub fn dijkstra_with<A: AdjacencyAccess>(o: &QueryOracle<A>, v0: usize) -> ShortestPathTree {
    let n = o.node_count();
    assert!(v0 < n, "root {v0} out of range");
    let mut tree = ShortestPathTree::start(n, v0);
    let mut in_tree = vec![false; n];
    in_tree[v0] = true;
    // (cost, edge id, head, tail)
    let mut heap: BinaryHeap<Reverse<(Cost, usize, usize, usize)>> = BinaryHeap::new();
    let push_border = |heap: &mut BinaryHeap<_>, u: usize, du: f64, in_tree: &[bool]| {
        for nb in o.scan(u) {
            if nb.weight > 0.0 && !in_tree[nb.node] {
                heap.push(Reverse((Cost(du + 1.0 / nb.weight), nb.edge, nb.node, u)));
            }
        }
    };
    push_border(&mut heap, v0, 0.0, &in_tree);
    while let Some(Reverse((Cost(c), e, v, u))) = heap.pop() {
        if in_tree[v] {
            continue;
        }
        in_tree[v] = true;
        tree.dist[v] = c;
        tree.parent[v] = Some((u, e));
        tree.order.push(v);
        push_border(&mut heap, v, c, &in_tree);
    }
    tree
}

/// Solves `minfind(d, f, g)`: at most `d` items of pairwise distinct types
/// such that any item with a smaller value than a chosen one is dominated by
/// a chosen item of its own type.
///
/// Classically this is the `d` smallest per-type minima, ties broken by
/// index. `items[i] = (f(i), g(i))`. Returns indices ordered by
/// `(value, index)`. The modeled quantum cost is `sqrt(N * d)`.
pub fn minfind(d: usize, items: &[(f64, u64)]) -> Vec<usize> {
    let mut best: HashMap<u64, usize> = HashMap::new();
    for (i, &(f, g)) in items.iter().enumerate() {
        best.entry(g)
            .and_modify(|b| {
                if (Cost(f), i) < (Cost(items[*b].0), *b) {
                    *b = i;
                }
            })
            .or_insert(i);
    }
    let mut mins: Vec<usize> = best.into_values().collect();
    mins.sort_unstable_by_key(|&i| (Cost(items[i].0), i));
    mins.truncate(d);
    mins
}

pub fn minfind_cost(n_items: usize, d: usize) -> f64 {
    (n_items as f64 * d as f64).sqrt()
}

/// A border edge `(u, v)` leaving a partition, with its cost at the time the
/// border set was computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BorderEdge {
    pub tail: usize,
    pub head: usize,
    pub edge: usize,
    pub cost: f64,
}

/// Partitions `P_1..P_L` of the current tree and their border sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionState {
    pub parts: Vec<Vec<usize>>,
    pub borders: Vec<Vec<BorderEdge>>,
}

impl PartitionState {
    pub fn levels(&self) -> usize {
        self.parts.len()
    }

    /// Checks the loop invariants against a tree of `tree_size` nodes:
    /// sizes are nonincreasing powers of two with strict majority over the
    /// later parts, the parts cover the tree, and every border set has at
    /// most `|P_k|` edges with distinct heads.
    pub fn check_invariants(&self, tree_size: usize) -> Result<(), String> {
        let sizes: Vec<usize> = self.parts.iter().map(Vec::len).collect();
        let total: usize = sizes.iter().sum();
        if total != tree_size {
            return Err(format!("parts cover {total} nodes, tree has {tree_size}"));
        }
        for (k, &s) in sizes.iter().enumerate() {
            if !s.is_power_of_two() {
                return Err(format!("|P_{}| = {s} is not a power of two", k + 1));
            }
            if k > 0 && s > sizes[k - 1] {
                return Err(format!("sizes increase at level {}: {sizes:?}", k + 1));
            }
            let rest: usize = sizes[k + 1..].iter().sum();
            if s <= rest {
                return Err(format!("|P_{}| = {s} not a strict majority over {rest}", k + 1));
            }
        }
        for (k, b) in self.borders.iter().enumerate() {
            if b.len() > sizes[k] {
                return Err(format!("|B_{}| = {} exceeds |P_{}| = {}", k + 1, b.len(), k + 1, sizes[k]));
            }
            let mut heads: Vec<usize> = b.iter().map(|e| e.head).collect();
            heads.sort_unstable();
            if heads.windows(2).any(|p| p[0] == p[1]) {
                return Err(format!("B_{} repeats an end node", k + 1));
            }
        }
        Ok(())
    }
}

pub fn spt_partitioned(g: &WeightedGraph, v0: usize) -> ShortestPathTree {
    spt_partitioned_with(&QueryOracle::new(g), v0, |_, _| {})
}

/// The partitioned shortest-path tree. `trace(state, tree_size)` is called
/// after the border set of the top partition is recomputed in every
/// iteration. Each `minfind` call is charged `sqrt(|E(P_L)| * |P_L|)`.
pub fn spt_partitioned_with<A, F>(o: &QueryOracle<A>, v0: usize, mut trace: F) -> ShortestPathTree
where
    A: AdjacencyAccess,
    F: FnMut(&PartitionState, usize),
{
    let n = o.node_count();
    assert!(v0 < n, "root {v0} out of range");
    let mut tree = ShortestPathTree::start(n, v0);
    let mut in_tree = vec![false; n];
    in_tree[v0] = true;
    let mut state = PartitionState { parts: vec![vec![v0]], borders: vec![Vec::new()] };
    // per-type best item, reset by stamping
    let mut best: Vec<Option<BorderEdge>> = vec![None; n];
    let mut touched: Vec<usize> = Vec::new();

    loop {
        // step 3: minfind(|P_L|) over the edges leaving the top partition
        let top = state.parts.len() - 1;
        let d = state.parts[top].len();
        let mut n_items = 0usize;
        for &u in &state.parts[top] {
            for nb in o.scan(u) {
                n_items += 1;
                let cost = if in_tree[nb.node] { f64::INFINITY } else { tree.dist[u] + edge_cost(nb.weight) };
                let item = BorderEdge { tail: u, head: nb.node, edge: nb.edge, cost };
                match &mut best[nb.node] {
                    Some(b) => {
                        if (Cost(cost), nb.edge) < (Cost(b.cost), b.edge) {
                            *b = item;
                        }
                    }
                    slot @ None => {
                        *slot = Some(item);
                        touched.push(nb.node);
                    }
                }
            }
        }
        let mut mins: Vec<BorderEdge> = touched.drain(..).filter_map(|v| best[v].take()).collect();
        mins.sort_unstable_by_key(|b| (Cost(b.cost), b.edge));
        mins.truncate(d);
        o.charge_quantum(minfind_cost(n_items, d));
        state.borders[top] = mins;

        debug_assert_eq!(state.check_invariants(tree.order.len()), Ok(()));
        trace(&state, tree.order.len());

        // step 5: least-cost edge into a node outside the tree
        let next = state
            .borders
            .iter()
            .flatten()
            .filter(|b| !in_tree[b.head])
            .min_by_key(|b| (Cost(b.cost), b.edge))
            .copied();
        let Some(b) = next.filter(|b| b.cost.is_finite()) else {
            break;
        };
        in_tree[b.head] = true;
        tree.dist[b.head] = b.cost;
        tree.parent[b.head] = Some((b.tail, b.edge));
        tree.order.push(b.head);
        state.parts.push(vec![b.head]);
        state.borders.push(Vec::new());

        // merge equal-sized trailing partitions
        while state.parts.len() >= 2 {
            let l = state.parts.len();
            if state.parts[l - 1].len() != state.parts[l - 2].len() {
                break;
            }
            let last = state.parts.pop().expect("two parts");
            state.borders.pop();
            state.parts[l - 2].extend(last);
            state.borders[l - 2].clear();
        }
    }
    tree
}
