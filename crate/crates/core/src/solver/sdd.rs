//! Symmetric diagonally dominant systems.
//!
//! An SDD matrix splits as `A = D + P + N` (diagonal, positive and negative
//! off-diagonals). The Gremban reduction doubles it into an SDDM matrix,
//! which is a graph Laplacian plus a nonnegative diagonal excess.

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::graph::WeightedGraph;
use crate::oracle::CostLedger;
use crate::rng::rng_from;
use crate::sparsify::{refined_sparsify, SparsifyConfig};

use super::linear::{pcg, Deflation, LinearOperator, DEFAULT_TOL};
use super::{SolveResult, SolverError};

/// Relative tolerance of the diagonal dominance check.
const DOMINANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SddSystem {
    n: usize,
    diag: Vec<f64>,
    /// Off-diagonal entries `(i, j, a_ij)` with `i < j`, sorted, nonzero.
    off: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<(usize, f64)>>,
    pub b: Vec<f64>,
}

impl SddSystem {
    /// Builds from the diagonal and the upper or lower off-diagonal entries,
    /// each unordered pair listed at most once. Duplicates are summed.
    pub fn new(diag: Vec<f64>, off: &[(usize, usize, f64)], b: Vec<f64>) -> Result<Self, SolverError> {
        let n = diag.len();
        if b.len() != n {
            return Err(SolverError::LengthMismatch { expected: n, got: b.len() });
        }
        for (i, &d) in diag.iter().enumerate() {
            if !d.is_finite() {
                return Err(SolverError::BadEntry { row: i, col: i, value: d });
            }
        }
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(off.len());
        for &(i, j, v) in off {
            if i >= n || j >= n || i == j || !v.is_finite() {
                return Err(SolverError::BadEntry { row: i, col: j, value: v });
            }
            entries.push((i.min(j), i.max(j), v));
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        let mut adj = vec![Vec::new(); n];
        for &(i, j, v) in &merged {
            adj[i].push((j, v));
            adj[j].push((i, v));
        }
        for (i, row) in adj.iter().enumerate() {
            let off_sum: f64 = row.iter().map(|(_, v)| v.abs()).sum();
            if diag[i] + DOMINANCE_TOL * off_sum.max(diag[i].abs()) < off_sum {
                return Err(SolverError::NotSdd { row: i });
            }
        }
        Ok(SddSystem { n, diag, off: merged, adj, b })
    }

    /// From a dense symmetric matrix.
    pub fn from_dense(a: &DMatrix<f64>, b: Vec<f64>) -> Result<Self, SolverError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(SolverError::LengthMismatch { expected: n, got: a.ncols() });
        }
        let mut off = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if a[(i, j)] != a[(j, i)] {
                    return Err(SolverError::NotSymmetric { row: i, col: j });
                }
                if a[(i, j)] != 0.0 {
                    off.push((i, j, a[(i, j)]));
                }
            }
        }
        Self::new((0..n).map(|i| a[(i, i)]).collect(), &off, b)
    }

    /// Random SDD matrix: each pair is an entry with probability `p`, of
    /// random sign and magnitude in `[0.5, 2]`; the diagonal is the absolute
    /// row sum plus an excess in `[0.1, 1]`. `b` is standard normal-ish.
    pub fn random(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = rng_from(seed, &[0x5DD]);
        let mut off = Vec::new();
        let mut row_sum = vec![0.0; n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(p) {
                    let mag: f64 = rng.random_range(0.5..=2.0);
                    let v = if rng.random::<bool>() { mag } else { -mag };
                    off.push((i, j, v));
                    row_sum[i] += mag;
                    row_sum[j] += mag;
                }
            }
        }
        let diag = row_sum.iter().map(|s| s + rng.random_range(0.1..=1.0)).collect();
        let b = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        Self::new(diag, &off, b).expect("generated matrix is SDD")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `D`.
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal entries with `i < j`; `P` holds the positive ones, `N`
    /// the negative ones.
    pub fn off_diagonal(&self) -> &[(usize, usize, f64)] {
        &self.off
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diag));
        for &(i, j, v) in &self.off {
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        a
    }

    pub fn with_rhs(&self, b: Vec<f64>) -> Result<Self, SolverError> {
        if b.len() != self.n {
            return Err(SolverError::LengthMismatch { expected: self.n, got: b.len() });
        }
        Ok(SddSystem { b, ..self.clone() })
    }
}

impl LinearOperator for SddSystem {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            y[i] = self.diag[i] * x[i] + self.adj[i].iter().map(|&(j, v)| v * x[j]).sum::<f64>();
        }
    }
    fn diagonal(&self) -> Vec<f64> {
        self.diag.clone()
    }
}

/// `diag - A_graph`: off-diagonal magnitudes come from `graph`, the
/// diagonal is stored explicitly. SDDM exactly when `excess() >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sddm {
    pub graph: WeightedGraph,
    pub diag: Vec<f64>,
}

impl Sddm {
    /// Requires nonpositive off-diagonals.
    pub fn from_system(a: &SddSystem) -> Result<Self, SolverError> {
        let mut raw = Vec::with_capacity(a.off.len());
        for &(i, j, v) in &a.off {
            if v > 0.0 {
                return Err(SolverError::NotSddm { row: i, col: j });
            }
            raw.push((i, j, -v));
        }
        Ok(Sddm { graph: WeightedGraph::build(a.n, &raw)?, diag: a.diag.clone() })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// `diag(A) - diag(L)`.
    pub fn excess(&self) -> Vec<f64> {
        (0..self.n()).map(|v| self.diag[v] - self.graph.weighted_degree(v)).collect()
    }

    /// Row-wise weak diagonal dominance.
    pub fn is_wdd(&self) -> bool {
        (0..self.n()).all(|v| {
            let d = self.graph.weighted_degree(v);
            self.diag[v] + DOMINANCE_TOL * d.max(self.diag[v].abs()) >= d
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = self.graph.dense_laplacian().expect("size checked by caller");
        for v in 0..self.n() {
            a[(v, v)] = self.diag[v];
        }
        a
    }

    /// Components with no diagonal excess span the kernel.
    fn kernel(&self) -> Deflation {
        let comps = self.graph.components();
        let mut active = vec![true; comps.count];
        for (v, x) in self.excess().into_iter().enumerate() {
            if x.abs() > DOMINANCE_TOL * self.diag[v].abs().max(f64::MIN_POSITIVE) {
                active[comps.label[v]] = false;
            }
        }
        Deflation::from_parts(comps.label, active)
    }
}

impl LinearOperator for Sddm {
    fn dim(&self) -> usize {
        self.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for v in 0..self.n() {
            y[v] = self.diag[v] * x[v] - self.graph.neighbors(v).iter().map(|nb| nb.weight * x[nb.node]).sum::<f64>();
        }
    }
    fn diagonal(&self) -> Vec<f64> {
        self.diag.clone()
    }
}

/// `A^ = [[D + N, -P], [-P, D + N]]`, `b^ = [b; -b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gremban {
    pub a_hat: Sddm,
    pub b_hat: Vec<f64>,
    n: usize,
}

impl Gremban {
    /// `z = (z^_1 - z^_2) / 2`.
    pub fn recover(&self, z_hat: &[f64]) -> Vec<f64> {
        assert_eq!(z_hat.len(), 2 * self.n);
        (0..self.n).map(|i| (z_hat[i] - z_hat[self.n + i]) / 2.0).collect()
    }
}

pub fn gremban_reduce(a: &SddSystem) -> Gremban {
    let n = a.n;
    let mut raw = Vec::with_capacity(2 * a.off.len());
    for &(i, j, v) in &a.off {
        if v < 0.0 {
            raw.push((i, j, -v));
            raw.push((n + i, n + j, -v));
        } else {
            raw.push((i, n + j, v));
            raw.push((n + i, j, v));
        }
    }
    let graph = WeightedGraph::build(2 * n, &raw).expect("doubled entries are valid");
    let diag = a.diag.iter().chain(a.diag.iter()).copied().collect();
    let b_hat = a.b.iter().copied().chain(a.b.iter().map(|x| -x)).collect();
    Gremban { a_hat: Sddm { graph, diag }, b_hat, n }
}

/// `A~ = L~ + D^` with `L~` a refined sparsifier of the Laplacian part of
/// `A^` and `D^` its diagonal excess. Off-diagonals and degrees come from
/// `L~`, so `A~` is SDDM and `A~ ~eps A^`.
pub fn sddm_sparsify(a_hat: &Sddm, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<Sddm, SolverError> {
    sparsify_with_ledger(a_hat, eps, seed, cfg).map(|(a, _)| a)
}

fn sparsify_with_ledger(a_hat: &Sddm, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<(Sddm, CostLedger), SolverError> {
    let s = refined_sparsify(&a_hat.graph, eps, seed, cfg)?;
    let h = s.to_graph(&a_hat.graph);
    let diag = a_hat.excess().iter().enumerate().map(|(v, x)| h.weighted_degree(v) + x.max(0.0)).collect();
    Ok((Sddm { graph: h, diag }, s.ledger))
}

/// Gremban reduction, SDDM sparsification, a tight solve on the sparse
/// system and recovery.
pub fn sdd_solve(a: &SddSystem, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<SolveResult, SolverError> {
    let red = gremban_reduce(a);
    let (a_tilde, ledger) = sparsify_with_ledger(&red.a_hat, eps, seed, cfg)?;
    let inner = pcg(&a_tilde, &red.b_hat, DEFAULT_TOL, 20 * a_tilde.n().max(1), &a_tilde.kernel());
    let (inner, converged) = match inner {
        Ok(r) => (r, true),
        Err(SolverError::NoConvergence(r)) => (*r, false),
        Err(e) => return Err(e),
    };
    let x = red.recover(&inner.x);
    let mut ax = vec![0.0; a.n];
    a.apply(&x, &mut ax);
    let b_norm = a.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r_norm = ax.iter().zip(&a.b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let residual = if b_norm > 0.0 { r_norm / b_norm } else { r_norm };
    let result = SolveResult { x, iterations: inner.iterations, residual, converged, projected: inner.projected, ledger };
    if converged {
        Ok(result)
    } else {
        Err(SolverError::NoConvergence(Box::new(result)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gremban_two_by_two() {
        let a = SddSystem::from_dense(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]), vec![1.0, 0.0]).unwrap();
        let g = gremban_reduce(&a);
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[2.0, 0.0, 0.0, -1.0, 0.0, 2.0, -1.0, 0.0, 0.0, -1.0, 2.0, 0.0, -1.0, 0.0, 0.0, 2.0],
        );
        assert_eq!(g.a_hat.to_dense(), expect);
        assert_eq!(g.b_hat, vec![1.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn rejects_non_sdd() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(SddSystem::from_dense(&m, vec![0.0; 2]), Err(SolverError::NotSdd { row: 0 })));
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(SddSystem::from_dense(&m, vec![0.0; 2]), Err(SolverError::NotSymmetric { .. })));
        let pos = SddSystem::from_dense(&DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]), vec![0.0; 2]).unwrap();
        assert!(matches!(Sddm::from_system(&pos), Err(SolverError::NotSddm { .. })));
    }

    #[test]
    fn sddm_round_trip_is_block_diagonal() {
        let a = SddSystem::random(12, 0.4, 3);
        let off: Vec<_> = a.off_diagonal().iter().map(|&(i, j, v)| (i, j, -v.abs())).collect();
        let sddm = SddSystem::new(a.diag().to_vec(), &off, a.b.clone()).unwrap();
        let red = gremban_reduce(&sddm);
        let dense = red.a_hat.to_dense();
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(dense[(i, 12 + j)], 0.0);
            }
        }
        let x: Vec<f64> = (0..12).map(|i| i as f64 - 3.0).collect();
        let stacked: Vec<f64> = x.iter().copied().chain(x.iter().map(|v| -v)).collect();
        assert_eq!(red.recover(&stacked), x);
    }

    #[test]
    fn zero_rhs_solves_to_zero() {
        let a = SddSystem::random(10, 0.5, 1).with_rhs(vec![0.0; 10]).unwrap();
        let r = sdd_solve(&a, 0.5, 1, &SparsifyConfig::default()).unwrap();
        assert_eq!(r.x, vec![0.0; 10]);
    }

    #[test]
    fn diagonal_matrix_is_unchanged() {
        let a = SddSystem::new(vec![1.0, 2.0, 3.0], &[], vec![1.0, 1.0, 1.0]).unwrap();
        let red = gremban_reduce(&a);
        let t = sddm_sparsify(&red.a_hat, 0.5, 1, &SparsifyConfig::default()).unwrap();
        assert_eq!(t, red.a_hat);
        let r = sdd_solve(&a, 0.5, 1, &SparsifyConfig::default()).unwrap();
        assert!((r.x[2] - 1.0 / 3.0).abs() < 1e-12);
    }
}
