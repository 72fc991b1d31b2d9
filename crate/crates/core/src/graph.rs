//! Undirected weighted graphs in compressed adjacency form.
//!
//! Edge weights are conductances. Traversal cost of an edge is `1/w`, so a
//! zero-weight edge is "forbidden": it is stored and counted but never
//! traversed by path algorithms.

use nalgebra::DMatrix;
use thiserror::Error;

/// Largest node count for which dense `n x n` matrices are built.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop on node {0} rejected")]
    RejectedEdge(usize),
    #[error("node id {id} out of range for {n} nodes")]
    BadNodeId { id: usize, n: usize },
    #[error("edge ({u}, {v}) has invalid weight {w}")]
    BadWeight { u: usize, v: usize, w: f64 },
    #[error("vector of length {got} does not match {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dense form requested for {n} nodes (limit {limit})")]
    TooLargeForDense { n: usize, limit: usize },
    #[error("cut must be a nonempty proper subset of the {n} nodes")]
    BadCut { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// One adjacency-list entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub node: usize,
    pub weight: f64,
    pub edge: usize,
}

/// Adjacency-list access: degree and k-th neighbor of a node. Implemented by
/// explicit graphs, reweighted views and implicitly defined graphs.
pub trait AdjacencyAccess {
    fn node_count(&self) -> usize;
    /// Edge ids reported by `neighbor` lie in `0..edge_count()`.
    fn edge_count(&self) -> usize;
    fn degree(&self, v: usize) -> usize;
    /// The `k`-th entry of `v`'s adjacency list. Callers guarantee
    /// `v < node_count()` and `k < degree(v)`.
    fn neighbor(&self, v: usize, k: usize) -> Neighbor;
}

impl<T: AdjacencyAccess + ?Sized> AdjacencyAccess for &T {
    fn node_count(&self) -> usize {
        (**self).node_count()
    }
    fn edge_count(&self) -> usize {
        (**self).edge_count()
    }
    fn degree(&self, v: usize) -> usize {
        (**self).degree(v)
    }
    fn neighbor(&self, v: usize, k: usize) -> Neighbor {
        (**self).neighbor(v, k)
    }
}

/// Immutable weighted undirected graph.
///
/// Edges are stored with `u < v`, sorted by `(u, v)`, with parallel input
/// edges merged by summing their weights. Edge ids index into [`edges`].
///
/// [`edges`]: WeightedGraph::edges
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    adj: Vec<Neighbor>,
    total_weight: f64,
}

impl WeightedGraph {
    /// Builds a graph from raw `(u, v, w)` triples.
    pub fn build(n: usize, raw_edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut canon = Vec::with_capacity(raw_edges.len());
        for &(u, v, w) in raw_edges {
            if u >= n {
                return Err(GraphError::BadNodeId { id: u, n });
            }
            if v >= n {
                return Err(GraphError::BadNodeId { id: v, n });
            }
            if u == v {
                return Err(GraphError::RejectedEdge(u));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(GraphError::BadWeight { u, v, w });
            }
            canon.push((u.min(v), u.max(v), w));
        }
        // sort on the full triple so the merged sums do not depend on input order
        canon.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        let mut edges: Vec<Edge> = Vec::with_capacity(canon.len());
        for (u, v, w) in canon {
            match edges.last_mut() {
                Some(last) if last.u == u && last.v == v => last.w += w,
                _ => edges.push(Edge { u, v, w }),
            }
        }
        Ok(Self::from_canonical(n, edges))
    }

    /// Builds from edges already in canonical form (`u < v`, sorted, unique).
    pub(crate) fn from_canonical(n: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|p| (p[0].u, p[0].v) < (p[1].u, p[1].v)));
        let mut deg = vec![0usize; n + 1];
        for e in &edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![Neighbor { node: 0, weight: 0.0, edge: 0 }; 2 * edges.len()];
        for (id, e) in edges.iter().enumerate() {
            adj[fill[e.u]] = Neighbor { node: e.v, weight: e.w, edge: id };
            fill[e.u] += 1;
            adj[fill[e.v]] = Neighbor { node: e.u, weight: e.w, edge: id };
            fill[e.v] += 1;
        }
        let total_weight = edges.iter().map(|e| e.w).sum();
        WeightedGraph { n, edges, offsets, adj, total_weight }
    }

    /// Same node set, keeping only the listed edge ids with new weights.
    /// Ids must be strictly increasing.
    pub fn reweighted_subgraph(&self, kept: &[(usize, f64)]) -> WeightedGraph {
        let edges = kept
            .iter()
            .map(|&(id, w)| Edge { w, ..self.edges[id] })
            .collect();
        Self::from_canonical(self.n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn neighbors(&self, v: usize) -> &[Neighbor] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Looks up the id of edge `{u, v}`.
    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&(a, b)))
            .ok()
    }

    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.neighbors(v).iter().map(|nb| nb.weight).sum()
    }

    /// Signed incidence vector of an edge under the `u < v` orientation.
    pub fn edge_vector(&self, id: usize) -> EdgeVector {
        let e = self.edges[id];
        EdgeVector { tail: e.u, head: e.v }
    }

    /// `y = L x`.
    pub fn laplacian_apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for (v, yv) in y.iter_mut().enumerate() {
            let xv = x[v];
            *yv = self
                .neighbors(v)
                .iter()
                .map(|nb| nb.weight * (xv - x[nb.node]))
                .sum();
        }
    }

    /// `sum_e w_e (x_u - x_v)^2`.
    pub fn laplacian_quadratic(&self, x: &[f64]) -> Result<f64, GraphError> {
        if x.len() != self.n {
            return Err(GraphError::LengthMismatch { expected: self.n, got: x.len() });
        }
        Ok(self
            .edges
            .iter()
            .map(|e| {
                let d = x[e.u] - x[e.v];
                e.w * d * d
            })
            .sum())
    }

    /// Total weight of edges crossing the cut.
    pub fn cut_value(&self, cut: &Cut) -> f64 {
        self.edges
            .iter()
            .filter(|e| cut.contains(e.u) != cut.contains(e.v))
            .map(|e| e.w)
            .sum()
    }

    /// Dense `L = D - A`.
    pub fn dense_laplacian(&self) -> Result<DMatrix<f64>, GraphError> {
        if self.n > DENSE_LIMIT {
            return Err(GraphError::TooLargeForDense { n: self.n, limit: DENSE_LIMIT });
        }
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            l[(e.u, e.v)] -= e.w;
            l[(e.v, e.u)] -= e.w;
            l[(e.u, e.u)] += e.w;
            l[(e.v, e.v)] += e.w;
        }
        Ok(l)
    }

    /// Connected components over positive-weight edges.
    pub fn components(&self) -> Components {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for nb in self.neighbors(u) {
                    if nb.weight > 0.0 && label[nb.node] == usize::MAX {
                        label[nb.node] = count;
                        stack.push(nb.node);
                    }
                }
            }
            count += 1;
        }
        Components { label, count }
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().count == 1
    }
}

impl AdjacencyAccess for WeightedGraph {
    fn node_count(&self) -> usize {
        self.n
    }
    fn edge_count(&self) -> usize {
        self.edges.len()
    }
    #[inline]
    fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
    #[inline]
    fn neighbor(&self, v: usize, k: usize) -> Neighbor {
        self.adj[self.offsets[v] + k]
    }
}

/// A graph seen through a different weight function. Removed or sieved
/// edges are expressed as weight 0 without materializing a new graph.
pub struct ReweightedView<'g, F> {
    graph: &'g WeightedGraph,
    weight: F,
}

impl<'g, F: Fn(usize, f64) -> f64> ReweightedView<'g, F> {
    /// `weight(edge_id, base_weight)` gives the viewed weight.
    pub fn new(graph: &'g WeightedGraph, weight: F) -> Self {
        ReweightedView { graph, weight }
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }
}

impl<F: Fn(usize, f64) -> f64> AdjacencyAccess for ReweightedView<'_, F> {
    fn node_count(&self) -> usize {
        self.graph.n
    }
    fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }
    #[inline]
    fn degree(&self, v: usize) -> usize {
        self.graph.degree(v)
    }
    #[inline]
    fn neighbor(&self, v: usize, k: usize) -> Neighbor {
        let nb = self.graph.neighbor(v, k);
        Neighbor { weight: (self.weight)(nb.edge, nb.weight), ..nb }
    }
}

/// Component labelling; labels are `0..count` in order of first node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub label: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.label {
            sizes[l] += 1;
        }
        sizes
    }

    /// Subtracts the per-component mean from `x`. Returns the largest
    /// absolute component sum removed.
    pub fn remove_means(&self, x: &mut [f64]) -> f64 {
        let mut sums = vec![0.0; self.count];
        for (v, &xv) in x.iter().enumerate() {
            sums[self.label[v]] += xv;
        }
        let sizes = self.sizes();
        for (v, xv) in x.iter_mut().enumerate() {
            let c = self.label[v];
            *xv -= sums[c] / sizes[c] as f64;
        }
        sums.iter().fold(0.0, |acc, s| acc.max(s.abs()))
    }
}

/// `chi_tail - chi_head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeVector {
    pub tail: usize,
    pub head: usize,
}

impl EdgeVector {
    pub fn dot(&self, x: &[f64]) -> f64 {
        x[self.tail] - x[self.head]
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[self.tail] = 1.0;
        v[self.head] = -1.0;
        v
    }
}

/// Node set `S` with `0 < |S| < n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    member: Vec<bool>,
}

impl Cut {
    pub fn new(n: usize, members: &[usize]) -> Result<Self, GraphError> {
        let mut member = vec![false; n];
        for &v in members {
            if v >= n {
                return Err(GraphError::BadNodeId { id: v, n });
            }
            member[v] = true;
        }
        Self::from_indicator(member)
    }

    pub fn from_indicator(member: Vec<bool>) -> Result<Self, GraphError> {
        let size = member.iter().filter(|&&b| b).count();
        if size == 0 || size == member.len() {
            return Err(GraphError::BadCut { n: member.len() });
        }
        Ok(Cut { member })
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.member[v]
    }

    pub fn complement(&self) -> Cut {
        Cut { member: self.member.iter().map(|b| !b).collect() }
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.member.len()).filter(|&v| self.member[v]).collect()
    }

    pub fn indicator(&self) -> Vec<f64> {
        self.member.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn n(&self) -> usize {
        self.member.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use proptest::prelude::*;

    fn path3() -> WeightedGraph {
        WeightedGraph::build(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn empty_graph() {
        let g = WeightedGraph::build(3, &[]).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 0);
        assert_eq!(g.components().count, 3);
    }

    #[test]
    fn parallel_edges_merge() {
        let g = WeightedGraph::build(2, &[(0, 1, 1.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(g.edges(), &[Edge { u: 0, v: 1, w: 3.0 }]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(WeightedGraph::build(2, &[(0, 0, 1.0)]), Err(GraphError::RejectedEdge(0)));
        assert!(matches!(
            WeightedGraph::build(2, &[(0, 2, 1.0)]),
            Err(GraphError::BadNodeId { id: 2, n: 2 })
        ));
        assert!(matches!(WeightedGraph::build(2, &[(0, 1, -1.0)]), Err(GraphError::BadWeight { .. })));
        assert!(matches!(WeightedGraph::build(2, &[(0, 1, f64::NAN)]), Err(GraphError::BadWeight { .. })));
    }

    #[test]
    fn path_cuts() {
        let g = path3();
        assert_eq!(g.cut_value(&Cut::new(3, &[0]).unwrap()), 1.0);
        assert_eq!(g.cut_value(&Cut::new(3, &[1]).unwrap()), 2.0);
        assert!(Cut::new(3, &[]).is_err());
        assert!(Cut::new(3, &[0, 1, 2]).is_err());
    }

    #[test]
    fn dense_laplacian_small_cases() {
        let g = WeightedGraph::build(2, &[(0, 1, 2.0)]).unwrap();
        let l = g.dense_laplacian().unwrap();
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[2.0, -2.0, -2.0, 2.0]));

        let tri = WeightedGraph::build(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let l = tri.dense_laplacian().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l[(i, j)], if i == j { 2.0 } else { -1.0 });
            }
        }
    }

    #[test]
    fn dense_guard() {
        let g = WeightedGraph::build(DENSE_LIMIT + 1, &[]).unwrap();
        assert!(matches!(g.dense_laplacian(), Err(GraphError::TooLargeForDense { .. })));
    }

    #[test]
    fn quadratic_form_matches_dense_and_cuts() {
        let g = gen::erdos_renyi(30, 0.3, 0.5, 2.0, 11);
        let l = g.dense_laplacian().unwrap();
        let x: Vec<f64> = (0..30).map(|i| ((i * 37 % 11) as f64) - 4.5).collect();
        let xv = nalgebra::DVector::from_vec(x.clone());
        let dense = (xv.transpose() * &l * &xv)[(0, 0)];
        let q = g.laplacian_quadratic(&x).unwrap();
        assert!((dense - q).abs() <= 1e-10 * dense.abs().max(1.0));

        let g20 = gen::erdos_renyi(20, 0.4, 1.0, 3.0, 5);
        let cut = Cut::new(20, &[0, 3, 4, 9, 15]).unwrap();
        let val = g20.cut_value(&cut);
        let quad = g20.laplacian_quadratic(&cut.indicator()).unwrap();
        assert!((val - quad).abs() < 1e-12);
        assert!(matches!(
            g20.laplacian_quadratic(&[0.0; 3]),
            Err(GraphError::LengthMismatch { expected: 20, got: 3 })
        ));
    }

    #[test]
    fn dense_laplacian_is_psd() {
        let g = gen::erdos_renyi(40, 0.2, 0.1, 5.0, 3);
        let l = g.dense_laplacian().unwrap();
        let eig = nalgebra::SymmetricEigen::new(l.clone());
        assert!(eig.eigenvalues.iter().all(|&x| x >= -1e-9));
        for i in 0..40 {
            assert!(l.row(i).sum().abs() <= 1e-12);
        }
    }

    #[test]
    fn edge_vector_sums_to_zero() {
        let g = path3();
        let ev = g.edge_vector(1);
        assert_eq!(ev, EdgeVector { tail: 1, head: 2 });
        assert_eq!(ev.to_dense(3).iter().sum::<f64>(), 0.0);
    }

    proptest! {
        #[test]
        fn build_is_order_independent(
            raw in proptest::collection::vec((0usize..8, 0usize..8, 0.0f64..4.0), 0..30),
            rot in 0usize..30,
        ) {
            let raw: Vec<_> = raw.into_iter().filter(|e| e.0 != e.1).collect();
            let g1 = WeightedGraph::build(8, &raw).unwrap();
            let mut shuffled = raw.clone();
            if !shuffled.is_empty() {
                let k = rot % shuffled.len();
                shuffled.rotate_left(k);
                shuffled.reverse();
            }
            let g2 = WeightedGraph::build(8, &shuffled).unwrap();
            prop_assert_eq!(g1, g2);
        }

        #[test]
        fn quadratic_form_nonnegative_and_cut_symmetric(
            seed in 0u64..1000,
            x in proptest::collection::vec(-5.0f64..5.0, 12),
            mask in 1u32..((1 << 12) - 1),
        ) {
            let g = gen::erdos_renyi(12, 0.4, 0.1, 3.0, seed);
            prop_assert!(g.laplacian_quadratic(&x).unwrap() >= 0.0);
            let comps = g.components();
            let constant: Vec<f64> = comps.label.iter().map(|&c| c as f64 * 1.7 - 2.0).collect();
            prop_assert!(g.laplacian_quadratic(&constant).unwrap().abs() < 1e-12);
            let members: Vec<usize> = (0..12).filter(|i| mask >> i & 1 == 1).collect();
            let cut = Cut::new(12, &members).unwrap();
            prop_assert!((g.cut_value(&cut) - g.cut_value(&cut.complement())).abs() < 1e-12);
        }
    }
}
