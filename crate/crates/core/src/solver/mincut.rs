use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::Serialize;

use crate::graph::{Cut, GraphError, WeightedGraph};
use crate::oracle::CostLedger;
use crate::paths::Cost;
use crate::sparsify::{refined_sparsify, SparsifyConfig};

use super::SolverError;

#[derive(Debug, Clone, PartialEq)]
pub struct MinCut {
    pub cut: Cut,
    pub value: f64,
    /// Queries spent on the sparsifier; zero for the exact algorithm.
    pub ledger: CostLedger,
}

/// Report form of a [`MinCut`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinCutReport {
    pub value: f64,
    pub side: Vec<usize>,
}

impl MinCut {
    pub fn report(&self) -> MinCutReport {
        MinCutReport { value: self.value, side: self.cut.members() }
    }
}

/// Exact global minimum cut by Stoer-Wagner with a lazy max-heap,
/// `O(n m log n)`. Disconnected graphs give a zero cut.
pub fn stoer_wagner(g: &WeightedGraph) -> Result<MinCut, SolverError> {
    let n = g.n();
    if n < 2 {
        return Err(GraphError::BadCut { n }.into());
    }
    let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for e in g.edges() {
        if e.w > 0.0 {
            *adj[e.u].entry(e.v).or_insert(0.0) += e.w;
            *adj[e.v].entry(e.u).or_insert(0.0) += e.w;
        }
    }
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut alive: Vec<bool> = vec![true; n];
    let mut best: Option<(f64, Vec<usize>)> = None;

    let mut key = vec![0.0; n];
    let mut added = vec![false; n];
    for remaining in (2..=n).rev() {
        let start = alive.iter().position(|&a| a).expect("at least two supernodes");
        key.iter_mut().for_each(|k| *k = 0.0);
        added.iter_mut().for_each(|a| *a = false);
        let mut heap = BinaryHeap::new();
        heap.push((Cost(0.0), Reverse(start)));
        let (mut prev, mut last) = (start, start);
        let mut count = 0;
        while count < remaining {
            // unreached supernodes of other components still enter the order
            let (k, Reverse(v)) = match heap.pop() {
                Some(item) => item,
                None => {
                    let v = (0..n).find(|&v| alive[v] && !added[v]).expect("supernode left");
                    (Cost(0.0), Reverse(v))
                }
            };
            if added[v] || k.0 != key[v] {
                continue;
            }
            added[v] = true;
            count += 1;
            prev = last;
            last = v;
            for (&u, &w) in &adj[v] {
                if !added[u] {
                    key[u] += w;
                    heap.push((Cost(key[u]), Reverse(u)));
                }
            }
        }
        let (s, t) = (prev, last);
        let phase = key[t];
        if best.as_ref().is_none_or(|(b, _)| phase < *b) {
            best = Some((phase, groups[t].clone()));
        }
        // merge t into s
        let t_adj = std::mem::take(&mut adj[t]);
        for (u, w) in t_adj {
            adj[u].remove(&t);
            if u != s {
                *adj[s].entry(u).or_insert(0.0) += w;
                *adj[u].entry(s).or_insert(0.0) += w;
            }
        }
        let moved = std::mem::take(&mut groups[t]);
        groups[s].extend(moved);
        alive[t] = false;
    }
    let (_, side) = best.expect("n >= 2");
    let cut = Cut::new(n, &side)?;
    let value = g.cut_value(&cut);
    Ok(MinCut { cut, value, ledger: CostLedger::default() })
}

/// Stoer-Wagner on a refined sparsifier at `eps`; the returned value is the
/// cut's value in `g`.
pub fn min_cut_approx(g: &WeightedGraph, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<MinCut, SolverError> {
    if g.n() < 2 {
        return Err(GraphError::BadCut { n: g.n() }.into());
    }
    if !g.is_connected() {
        return Err(SolverError::Disconnected);
    }
    let s = refined_sparsify(g, eps, seed, cfg)?;
    let on_h = stoer_wagner(&s.to_graph(g))?;
    let value = g.cut_value(&on_h.cut);
    Ok(MinCut { cut: on_h.cut, value, ledger: s.ledger })
}
