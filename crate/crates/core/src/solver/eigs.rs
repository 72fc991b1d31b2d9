use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::dense::sorted_eigen;
use crate::graph::WeightedGraph;
use crate::oracle::CostLedger;
use crate::rng::{rng_from, STREAM_EIGS};
use crate::sparsify::{refined_sparsify, SparsifyConfig};

use super::linear::{pcg, Deflation};
use super::SolverError;

const MAX_ROUNDS: usize = 500;
const RESIDUAL_TOL: f64 = 1e-9;
const INNER_TOL: f64 = 1e-12;

/// Bottom eigenpairs, eigenvalues nondecreasing, vectors orthonormal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// Edge count of the sparsifier the iteration ran on.
    pub sparsifier_edges: usize,
    pub rounds: usize,
    pub ledger: CostLedger,
}

/// The `k` smallest eigenpairs of `L_G`, computed on a refined sparsifier
/// at `eps / 10` by subspace inverse iteration with Rayleigh-Ritz.
///
/// Kernel vectors are the normalized component indicators. The remaining
/// pairs come from iterating `L_H^+` on a random block orthogonal to them.
/// Eigenvalues are Rayleigh quotients on `H`.
pub fn bottom_eigs(g: &WeightedGraph, k: usize, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<EigenPairs, SolverError> {
    let n = g.n();
    if k >= n {
        return Err(SolverError::BadK { k, n });
    }
    let sparsifier = refined_sparsify(g, eps / 10.0, seed, cfg)?;
    let h = sparsifier.to_graph(g);
    let comps = h.components();
    let sizes = comps.sizes();

    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for c in 0..comps.count.min(k) {
        let scale = (sizes[c] as f64).sqrt().recip();
        vectors.push(comps.label.iter().map(|&l| if l == c { scale } else { 0.0 }).collect::<Vec<f64>>());
        values.push(0.0);
    }
    let want = k - vectors.len();
    if want == 0 {
        return Ok(EigenPairs { values, vectors, sparsifier_edges: sparsifier.len(), rounds: 0, ledger: sparsifier.ledger });
    }

    let kernel = Deflation::laplacian(&h);
    let image_dim = n - comps.count;
    let block = (want + want.max(4)).min(image_dim);
    let mut rng = rng_from(seed, &[STREAM_EIGS]);
    let mut x = DMatrix::from_fn(n, block, |_, _| rng.random_range(-1.0..1.0));
    for mut col in x.column_iter_mut() {
        let mut v: Vec<f64> = col.iter().copied().collect();
        kernel.project(&mut v);
        col.copy_from_slice(&v);
    }

    let apply = |v: &[f64]| {
        let mut out = vec![0.0; n];
        h.laplacian_apply(v, &mut out);
        out
    };
    let mut rounds = 0;
    let (mut ritz_values, mut ritz_vectors);
    loop {
        rounds += 1;
        let solved: Vec<Vec<f64>> = (0..block)
            .into_par_iter()
            .map(|c| {
                let b: Vec<f64> = x.column(c).iter().copied().collect();
                match pcg(&h, &b, INNER_TOL, 20 * n, &kernel) {
                    Ok(r) => r.x,
                    Err(SolverError::NoConvergence(r)) => r.x,
                    Err(_) => b,
                }
            })
            .collect();
        let y = DMatrix::from_fn(n, block, |r, c| solved[c][r]);
        let mut q = y.qr().q();
        for mut col in q.column_iter_mut() {
            let mut v: Vec<f64> = col.iter().copied().collect();
            kernel.project(&mut v);
            col.copy_from_slice(&v);
        }
        // second pass restores orthonormality after the projection
        let q = q.qr().q();
        let mut lq = DMatrix::zeros(n, block);
        for c in 0..block {
            let col: Vec<f64> = q.column(c).iter().copied().collect();
            lq.set_column(c, &DVector::from_vec(apply(&col)));
        }
        let t = q.transpose() * &lq;
        let t = (&t + t.transpose()) * 0.5;
        let (vals, vecs) = sorted_eigen(t);
        ritz_vectors = &q * &vecs;
        ritz_values = vals;
        let lx = &lq * &vecs;
        let converged = (0..want).all(|c| {
            let res = (lx.column(c) - ritz_vectors.column(c) * ritz_values[c]).norm();
            res <= RESIDUAL_TOL * ritz_values[c].abs().max(f64::MIN_POSITIVE).max(ritz_values[block - 1] * 1e-3)
        });
        if converged || rounds >= MAX_ROUNDS {
            break;
        }
        x = ritz_vectors.clone();
    }
    for c in 0..want {
        let v: Vec<f64> = ritz_vectors.column(c).iter().copied().collect();
        let lv = apply(&v);
        let rq = v.iter().zip(&lv).map(|(a, b)| a * b).sum::<f64>() / v.iter().map(|a| a * a).sum::<f64>();
        values.push(rq.max(0.0));
        vectors.push(v);
    }
    // Rayleigh quotients can reorder near-degenerate pairs by rounding
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let values = order.iter().map(|&i| values[i]).collect();
    let vectors = order.iter().map(|&i| vectors[i].clone()).collect();
    Ok(EigenPairs { values, vectors, sparsifier_edges: sparsifier.len(), rounds, ledger: sparsifier.ledger })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn kernel_vector_first() {
        let g = gen::path(6, 1.0);
        let e = bottom_eigs(&g, 2, 0.25, 1, &SparsifyConfig::default()).unwrap();
        assert_eq!(e.values[0], 0.0);
        let s = 6f64.sqrt().recip();
        assert!(e.vectors[0].iter().all(|&v| (v - s).abs() < 1e-15));
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / 6.0).cos();
        assert!((e.values[1] - exact).abs() < 1e-9);
    }

    #[test]
    fn rejects_k_at_n() {
        let g = gen::path(3, 1.0);
        assert!(matches!(bottom_eigs(&g, 3, 0.25, 1, &SparsifyConfig::default()), Err(SolverError::BadK { k: 3, n: 3 })));
    }
}
