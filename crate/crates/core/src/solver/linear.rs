use crate::graph::WeightedGraph;
use crate::oracle::CostLedger;
use crate::sparsify::{refined_sparsify, SparsifyConfig};

use super::{SolveResult, SolverError};

/// Default relative residual for "tight" solves.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Symmetric positive semidefinite operator.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn diagonal(&self) -> Vec<f64>;
}

impl LinearOperator for WeightedGraph {
    fn dim(&self) -> usize {
        self.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.laplacian_apply(x, y)
    }
    fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|v| self.weighted_degree(v)).collect()
    }
}

/// Kernel spanned by the indicator vectors of selected components.
#[derive(Debug, Clone, PartialEq)]
pub struct Deflation {
    label: Vec<usize>,
    active: Vec<bool>,
    sizes: Vec<usize>,
}

impl Deflation {
    /// No kernel.
    pub fn none(n: usize) -> Self {
        Deflation { label: vec![0; n], active: vec![false], sizes: vec![n] }
    }

    /// Kernel of a graph Laplacian: constants on every component.
    pub fn laplacian(g: &WeightedGraph) -> Self {
        let comps = g.components();
        let count = comps.count;
        Self::from_parts(comps.label, vec![true; count])
    }

    /// `label[v]` is the component of `v`; `active[c]` marks components whose
    /// constant vector lies in the kernel.
    pub fn from_parts(label: Vec<usize>, active: Vec<bool>) -> Self {
        let mut sizes = vec![0; active.len()];
        for &l in &label {
            sizes[l] += 1;
        }
        Deflation { label, active, sizes }
    }

    pub fn is_trivial(&self) -> bool {
        !self.active.iter().any(|&a| a)
    }

    /// Removes the kernel component of `x`; returns the largest absolute
    /// per-component sum removed.
    pub fn project(&self, x: &mut [f64]) -> f64 {
        if self.is_trivial() {
            return 0.0;
        }
        let mut sums = vec![0.0; self.active.len()];
        for (v, &xv) in x.iter().enumerate() {
            sums[self.label[v]] += xv;
        }
        for (v, xv) in x.iter_mut().enumerate() {
            let c = self.label[v];
            if self.active[c] {
                *xv -= sums[c] / self.sizes[c] as f64;
            }
        }
        (0..sums.len()).filter(|&c| self.active[c]).fold(0.0, |acc, c| acc.max(sums[c].abs()))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned conjugate gradients on the complement of the
/// deflated kernel. `b` is projected first; the returned `x` is orthogonal
/// to the kernel and `residual` is recomputed against the projected `b`.
pub fn pcg<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    kernel: &Deflation,
) -> Result<SolveResult, SolverError> {
    let n = a.dim();
    if b.len() != n {
        return Err(SolverError::LengthMismatch { expected: n, got: b.len() });
    }
    let mut rhs = b.to_vec();
    let removed = kernel.project(&mut rhs);
    let b_norm = norm(&rhs);
    let projected = removed > 1e-12 * norm(b).max(f64::MIN_POSITIVE);
    if b_norm == 0.0 {
        return Ok(SolveResult {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
            converged: true,
            projected,
            ledger: CostLedger::default(),
        });
    }
    let inv_diag: Vec<f64> = a.diagonal().into_iter().map(|d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let precondition = |r: &[f64], z: &mut Vec<f64>| {
        z.clear();
        z.extend(r.iter().zip(&inv_diag).map(|(ri, di)| ri * di));
        kernel.project(z);
    };

    let mut x = vec![0.0; n];
    let mut r = rhs.clone();
    let mut z = Vec::with_capacity(n);
    let mut ap = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    let true_residual = |x: &[f64], out: &mut Vec<f64>| -> f64 {
        out.resize(n, 0.0);
        a.apply(x, out);
        for (o, bi) in out.iter_mut().zip(&rhs) {
            *o = bi - *o;
        }
        norm(out) / b_norm
    };
    let mut scratch = Vec::new();
    let mut residual = 1.0;
    while iterations < max_iter {
        iterations += 1;
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) / b_norm <= tol {
            // confirm against the true residual; restart from it on drift
            kernel.project(&mut x);
            residual = true_residual(&x, &mut scratch);
            if residual <= tol {
                break;
            }
            r.copy_from_slice(&scratch);
            kernel.project(&mut r);
            precondition(&r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        precondition(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    kernel.project(&mut x);
    residual = if iterations == 0 { residual } else { true_residual(&x, &mut scratch) };
    let result = SolveResult { x, iterations, residual, converged: residual <= tol, projected, ledger: CostLedger::default() };
    if result.converged {
        Ok(result)
    } else {
        Err(SolverError::NoConvergence(Box::new(result)))
    }
}

/// Solves `L_G x = b` in the pseudoinverse sense, capped at `20 n`
/// iterations.
pub fn solve_laplacian(g: &WeightedGraph, b: &[f64], tol: f64) -> Result<SolveResult, SolverError> {
    pcg(g, b, tol, 20 * g.n().max(1), &Deflation::laplacian(g))
}

/// Solves on a refined sparsifier `H` of `G` instead. When `H` is an
/// `eps`-spectral sparsifier, `||x~ - x||_{L_G} <= 2 eps ||x||_{L_G}`.
pub fn solve_via_sparsifier(
    g: &WeightedGraph,
    b: &[f64],
    eps: f64,
    seed: u64,
    cfg: &SparsifyConfig,
) -> Result<SolveResult, SolverError> {
    if b.len() != g.n() {
        return Err(SolverError::LengthMismatch { expected: g.n(), got: b.len() });
    }
    let s = refined_sparsify(g, eps, seed, cfg)?;
    with_ledger(solve_laplacian(&s.to_graph(g), b, DEFAULT_TOL), s.ledger)
}

/// Attaches a sparsifier's ledger to a solve outcome, converged or not.
pub(crate) fn with_ledger(r: Result<SolveResult, SolverError>, ledger: CostLedger) -> Result<SolveResult, SolverError> {
    match r {
        Ok(mut r) => {
            r.ledger = ledger;
            Ok(r)
        }
        Err(SolverError::NoConvergence(mut r)) => {
            r.ledger = ledger;
            Err(SolverError::NoConvergence(r))
        }
        Err(e) => Err(e),
    }
}
