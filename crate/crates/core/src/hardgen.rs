//! Lower-bound instances: unsparsifiable bipartite graphs and the hidden
//! graph `G(x)` that embeds copies of them behind a bit string `x`.
//!
//! Node layout of `G(x)` for parameters `n`, `m` and `c = 1/eps^2`:
//!
//! * `L1 = 0..n/2`: left node `i` of copy `k` is `k c + i`.
//! * `R1 = n/2..n`: right node `j` of copy `k` is `n/2 + k c + j`.
//! * `L2 = n..n + 2m/n`, `R2` the next `n/2` ids.
//!
//! Bit `sigma = ((k c + i) c + j) N + s` is slot `s` of string `x^(k)_{i,j}`.
//! It owns edge ids `2 sigma` (the edge at `l`) and `2 sigma + 1` (the edge
//! at `r`).

use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AdjacencyAccess, GraphError, Neighbor, WeightedGraph};
use crate::rng::{rng_from, STREAM_HARD};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardgenError {
    #[error("1/eps^2 must be an even integer >= 2 (eps = {0})")]
    BadEpsilon(f64),
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `1/eps^2` as an even integer.
fn inverse_square(eps: f64) -> Result<usize, HardgenError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(HardgenError::BadEpsilon(eps));
    }
    let c = 1.0 / (eps * eps);
    let rounded = c.round();
    if (c - rounded).abs() > 1e-9 * c || rounded < 2.0 || !(rounded as u64).is_multiple_of(2) {
        return Err(HardgenError::BadEpsilon(eps));
    }
    Ok(rounded as usize)
}

/// Random bipartite graph with `c = 1/eps^2` nodes per side (left `0..c`,
/// right `c..2c`), each left node joined to exactly `c/2` right nodes.
pub fn gen_b_eps(eps: f64, seed: u64) -> Result<WeightedGraph, HardgenError> {
    let c = inverse_square(eps)?;
    let mut rng = rng_from(seed, &[STREAM_HARD, 0]);
    let mut raw = Vec::with_capacity(c * c / 2);
    for i in 0..c {
        for j in sample(&mut rng, c, c / 2) {
            raw.push((i, c + j, 1.0));
        }
    }
    Ok(WeightedGraph::build(2 * c, &raw)?)
}

/// Bit string `x` with its shape. Valid inputs have at most one nonzero bit
/// per string and exactly `c/2` nonzero strings per row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenInput {
    pub n: usize,
    pub m: usize,
    /// `1/eps^2`.
    pub c: usize,
    pub bits: Vec<bool>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl HiddenInput {
    /// Checks the shape constraints (not validity) and wraps `bits`.
    pub fn from_bits(n: usize, m: usize, eps: f64, bits: Vec<bool>) -> Result<Self, HardgenError> {
        let c = inverse_square(eps)?;
        let warnings = check_shape(n, m, c)?;
        if bits.len() != m {
            return Err(HardgenError::BadShape(format!("{} bits for m = {m}", bits.len())));
        }
        Ok(HiddenInput { n, m, c, bits, warnings })
    }

    pub fn eps(&self) -> f64 {
        (self.c as f64).sqrt().recip()
    }

    /// `l = eps^2 n / 2` copies.
    pub fn copies(&self) -> usize {
        self.n / (2 * self.c)
    }

    /// `N = 2 eps^2 m / n` bits per string.
    pub fn string_len(&self) -> usize {
        2 * self.m / (self.n * self.c)
    }

    /// `2m/n`, the degree of every node of `G1` and the size of `L2`.
    pub fn half_degree(&self) -> usize {
        2 * self.m / self.n
    }

    pub fn slot(&self, k: usize, i: usize, j: usize, s: usize) -> usize {
        ((k * self.c + i) * self.c + j) * self.string_len() + s
    }

    /// `OR(x^(k)_{i,j})`.
    pub fn string_nonzero(&self, k: usize, i: usize, j: usize) -> bool {
        let start = self.slot(k, i, j, 0);
        self.bits[start..start + self.string_len()].iter().any(|&b| b)
    }

    pub fn nonzero_strings(&self) -> usize {
        let c = self.c;
        (0..self.copies()).map(|k| (0..c * c).filter(|&ij| self.string_nonzero(k, ij / c, ij % c)).count()).sum()
    }

    pub fn is_valid(&self) -> bool {
        let big_n = self.string_len();
        let c = self.c;
        (0..self.copies()).all(|k| {
            (0..c).all(|i| {
                let row_ok = (0..c).filter(|&j| self.string_nonzero(k, i, j)).count() == c / 2;
                row_ok
                    && (0..c).all(|j| {
                        let start = self.slot(k, i, j, 0);
                        self.bits[start..start + big_n].iter().filter(|&&b| b).count() <= 1
                    })
            })
        })
    }
}

fn check_shape(n: usize, m: usize, c: usize) -> Result<Vec<String>, HardgenError> {
    let bad = |msg: String| Err(HardgenError::BadShape(msg));
    if n == 0 || !n.is_multiple_of(2 * c) {
        return bad(format!("eps^2 n / 2 must be a positive integer (n = {n}, 1/eps^2 = {c})"));
    }
    if m == 0 || !(2 * m).is_multiple_of(n * c) {
        return bad(format!("2 eps^2 m / n must be a positive integer (n = {n}, m = {m}, 1/eps^2 = {c})"));
    }
    if 4 * m > n * n {
        return bad(format!("m = {m} exceeds n^2/4"));
    }
    let mut warnings = Vec::new();
    if m < n * c {
        warnings.push(format!(
            "eps = {:.4} is below sqrt(n/m) = {:.4}; the construction is still well defined",
            (c as f64).sqrt().recip(),
            (n as f64 / m as f64).sqrt()
        ));
    }
    Ok(warnings)
}

/// A valid input: for each copy and row, `c/2` uniformly chosen columns get
/// one nonzero bit at a uniform position of their string.
pub fn gen_valid_input(n: usize, m: usize, eps: f64, seed: u64) -> Result<HiddenInput, HardgenError> {
    let mut x = HiddenInput::from_bits(n, m, eps, vec![false; m])?;
    let mut rng = rng_from(seed, &[STREAM_HARD, 1]);
    let (c, big_n) = (x.c, x.string_len());
    for k in 0..x.copies() {
        for i in 0..c {
            for j in sample(&mut rng, c, c / 2) {
                let s = rng.random_range(0..big_n);
                let slot = x.slot(k, i, j, s);
                x.bits[slot] = true;
            }
        }
    }
    Ok(x)
}

/// The `i`-th edge `(i, i + j mod n/2)` of matching `M_j` in `G2`, as
/// `(left, right)` indices into `L2` and `R2`.
pub fn matching_edges(j: usize, m: usize, n: usize) -> Result<Vec<(usize, usize)>, HardgenError> {
    if n < 2 || !n.is_multiple_of(2) || !(2 * m).is_multiple_of(n) {
        return Err(HardgenError::BadShape(format!("n = {n} must be even and divide 2m = {}", 2 * m)));
    }
    let (left, right) = (2 * m / n, n / 2);
    if left > right {
        return Err(HardgenError::BadShape(format!("2m/n = {left} exceeds n/2 = {right}")));
    }
    if j >= right {
        return Err(HardgenError::BadShape(format!("matching index {j} not below n/2 = {right}")));
    }
    Ok((0..left).map(|i| (i, (i + j) % right)).collect())
}

/// Slot coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Slot {
    k: usize,
    i: usize,
    j: usize,
    s: usize,
}

/// `G(x)` answered on demand; every neighbor query reads exactly one bit
/// of `x`, degree queries read none.
#[derive(Debug)]
pub struct HiddenGraph {
    x: HiddenInput,
    lookups: AtomicU64,
}

impl HiddenGraph {
    pub fn input(&self) -> &HiddenInput {
        &self.x
    }

    /// Number of `x` bits read so far.
    pub fn x_lookups(&self) -> u64 {
        self.lookups.load(Ordering::Relaxed)
    }

    pub fn reset_lookups(&self) {
        self.lookups.store(0, Ordering::Relaxed);
    }

    fn half(&self) -> usize {
        self.x.n / 2
    }

    fn l2(&self, alpha: usize) -> usize {
        self.x.n + alpha
    }

    fn r2(&self, beta: usize) -> usize {
        self.x.n + self.x.half_degree() + beta
    }

    /// Matching index `t = k + i l` of left node `(k, i)`.
    fn matching_of(&self, k: usize, i: usize) -> usize {
        k + i * self.x.copies()
    }

    fn beta(&self, alpha: usize, t: usize) -> usize {
        (alpha + t) % self.half()
    }

    fn bit(&self, slot: Slot) -> (usize, bool) {
        let sigma = self.x.slot(slot.k, slot.i, slot.j, slot.s);
        self.lookups.fetch_add(1, Ordering::Relaxed);
        (sigma, self.x.bits[sigma])
    }

    /// Both edges of a slot under its bit, as `(id, u, v, w)`.
    fn slot_edges(&self, slot: Slot, bit: bool, sigma: usize) -> [(usize, usize, usize, f64); 2] {
        let c = self.x.c;
        let big_n = self.x.string_len();
        let l = slot.k * c + slot.i;
        let r = self.half() + slot.k * c + slot.j;
        let alpha = slot.j * big_n + slot.s;
        let beta = self.beta(alpha, self.matching_of(slot.k, slot.i));
        let (l2, r2) = (self.l2(alpha), self.r2(beta));
        if bit {
            [(2 * sigma, l, r, 1.0), (2 * sigma + 1, l2, r2, 0.0)]
        } else {
            [(2 * sigma, l, l2, 0.0), (2 * sigma + 1, r, r2, 0.0)]
        }
    }

    /// Explicit `G(x)`.
    pub fn materialize(&self) -> Result<WeightedGraph, HardgenError> {
        let raw = self.edge_triples();
        let g = WeightedGraph::build(self.node_count(), &raw)?;
        if g.m() != raw.len() {
            return Err(HardgenError::BadShape(format!("{} edges merged into {}", raw.len(), g.m())));
        }
        Ok(g)
    }

    /// All `2m` edges in hidden id order, without touching the lookup counter.
    pub fn edge_triples(&self) -> Vec<(usize, usize, f64)> {
        let c = self.x.c;
        let big_n = self.x.string_len();
        let mut out = Vec::with_capacity(2 * self.x.m);
        for k in 0..self.x.copies() {
            for i in 0..c {
                for j in 0..c {
                    for s in 0..big_n {
                        let slot = Slot { k, i, j, s };
                        let sigma = self.x.slot(k, i, j, s);
                        for (_, u, v, w) in self.slot_edges(slot, self.x.bits[sigma], sigma) {
                            out.push((u, v, w));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Builds `G(x)` after checking the matching conditions: edges at a left
/// node of `G1` go to distinct left ends in `G2`, and likewise on the right.
pub fn build_hidden_graph(x: HiddenInput) -> Result<HiddenGraph, HardgenError> {
    check_shape(x.n, x.m, x.c)?;
    if x.bits.len() != x.m {
        return Err(HardgenError::BadShape(format!("{} bits for m = {}", x.bits.len(), x.m)));
    }
    let (c, big_n, copies) = (x.c, x.string_len(), x.copies());
    let half = x.n / 2;
    // right ends of edges into r^(k)_j are j N + s + k + i l; distinct over
    // (i, s) exactly when N <= l
    if big_n > copies {
        return Err(HardgenError::BadShape(format!("string length {big_n} exceeds copy count {copies}")));
    }
    let g = HiddenGraph { x, lookups: AtomicU64::new(0) };
    for k in 0..copies {
        for j in 0..c {
            let mut seen = vec![false; half];
            for i in 0..c {
                for s in 0..big_n {
                    let beta = g.beta(j * big_n + s, g.matching_of(k, i));
                    if std::mem::replace(&mut seen[beta], true) {
                        return Err(HardgenError::BadShape(format!("right node {j} of copy {k} repeats right end {beta}")));
                    }
                }
            }
        }
    }
    Ok(g)
}

impl AdjacencyAccess for HiddenGraph {
    fn node_count(&self) -> usize {
        self.x.n + self.x.half_degree() + self.half()
    }

    fn edge_count(&self) -> usize {
        2 * self.x.m
    }

    fn degree(&self, v: usize) -> usize {
        if v < self.x.n {
            self.x.half_degree()
        } else if v < self.x.n + self.x.half_degree() {
            self.half()
        } else {
            self.x.half_degree()
        }
    }

    fn neighbor(&self, v: usize, idx: usize) -> Neighbor {
        let c = self.x.c;
        let big_n = self.x.string_len();
        let copies = self.x.copies();
        let half = self.half();
        // `end(bit)` picks which of the slot's two edges touches `v`
        let edge = |slot: Slot, end: fn(bool) -> usize| {
            let (sigma, bit) = self.bit(slot);
            let (id, a, b, weight) = self.slot_edges(slot, bit, sigma)[end(bit)];
            let node = if a == v { b } else { a };
            Neighbor { node, weight, edge: id }
        };
        if v < half {
            // left node of G1: entries ordered by (j, s)
            let (k, i) = (v / c, v % c);
            edge(Slot { k, i, j: idx / big_n, s: idx % big_n }, |_| 0)
        } else if v < self.x.n {
            // right node of G1: entries ordered by (i, s)
            let (k, j) = ((v - half) / c, (v - half) % c);
            edge(Slot { k, i: idx / big_n, j, s: idx % big_n }, |bit| if bit { 0 } else { 1 })
        } else if v < self.x.n + self.x.half_degree() {
            // left node alpha of G2: entry t is its edge in matching M_t
            let alpha = v - self.x.n;
            let (k, i) = (idx % copies, idx / copies);
            edge(Slot { k, i, j: alpha / big_n, s: alpha % big_n }, |bit| if bit { 1 } else { 0 })
        } else {
            // right node beta of G2: entry alpha is the edge (alpha, beta)
            let beta = v - self.x.n - self.x.half_degree();
            let alpha = idx;
            let t = (beta + half - alpha % half) % half;
            let slot = Slot { k: t % copies, i: t / copies, j: alpha / big_n, s: alpha % big_n };
            edge(slot, |_| 1)
        }
    }
}

/// `B(x)`: the unit-weight edges of `G(x)`, on `G(x)`'s node ids.
pub fn b_of_x(x: &HiddenInput) -> Vec<(usize, usize)> {
    let (c, half) = (x.c, x.n / 2);
    let mut out = Vec::new();
    for k in 0..x.copies() {
        for i in 0..c {
            for j in 0..c {
                if x.string_nonzero(k, i, j) {
                    out.push((k * c + i, half + k * c + j));
                }
            }
        }
    }
    out
}

/// Fraction of the nonzero strings of `x` revealed by `h`: a positive edge
/// of `h` between `l^(k)_i` and `r^(k)_j` identifies `x^(k)_{i,j}`. `h` is
/// on the node set of `G(x)`. Returns 0 when `x` has no nonzero string.
pub fn audit_sparsifier_recovery(x: &HiddenInput, h: &WeightedGraph) -> f64 {
    let (c, half) = (x.c, x.n / 2);
    let total = x.nonzero_strings();
    if total == 0 {
        return 0.0;
    }
    let mut found = vec![false; x.copies() * c * c];
    for e in h.edges() {
        if e.w <= 0.0 || e.u >= half || e.v < half || e.v >= x.n {
            continue;
        }
        let (k, i) = (e.u / c, e.u % c);
        let (k2, j) = ((e.v - half) / c, (e.v - half) % c);
        if k == k2 && x.string_nonzero(k, i, j) {
            found[(k * c + i) * c + j] = true;
        }
    }
    found.iter().filter(|&&f| f).count() as f64 / total as f64
}
