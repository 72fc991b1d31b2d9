//! Independent reference implementations for the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use sparsekit::oracle::{Field, PolyHash};
use sparsekit::WeightedGraph;

/// Edge length `1/w`; zero-weight edges are absent.
fn length(w: f64) -> Option<f64> {
    (w > 0.0).then(|| 1.0 / w)
}

/// Single-source distances by Bellman-Ford relaxation.
pub fn bellman_ford(g: &WeightedGraph, s: usize) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; g.n()];
    d[s] = 0.0;
    for _ in 0..g.n() {
        let mut changed = false;
        for e in g.edges() {
            let Some(l) = length(e.w) else { continue };
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                if d[a] + l < d[b] {
                    d[b] = d[a] + l;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    d
}

/// All-pairs distances by Floyd-Warshall.
pub fn floyd_warshall(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for (u, v, w) in edges {
        if let Some(l) = length(w) {
            if l < d[u][v] {
                d[u][v] = l;
                d[v][u] = l;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Dense Laplacian assembled directly from the edge list.
pub fn laplacian(g: &WeightedGraph) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(g.n(), g.n());
    for e in g.edges() {
        l[(e.u, e.u)] += e.w;
        l[(e.v, e.v)] += e.w;
        l[(e.u, e.v)] -= e.w;
        l[(e.v, e.u)] -= e.w;
    }
    l
}

/// `L^+` through nalgebra's SVD pseudoinverse.
pub fn svd_pinv(g: &WeightedGraph) -> DMatrix<f64> {
    laplacian(g).pseudo_inverse(1e-9).expect("svd converges")
}

pub fn pinv_solve(g: &WeightedGraph, b: &[f64]) -> Vec<f64> {
    (svd_pinv(g) * DVector::from_column_slice(b)).iter().copied().collect()
}

/// `sqrt(x^T M x)`.
pub fn m_norm(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let v = DVector::from_column_slice(x);
    (v.transpose() * m * &v)[(0, 0)].max(0.0).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Random vector with zero sum.
pub fn balanced_vector(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = b.iter().sum::<f64>() / n as f64;
    b.iter_mut().for_each(|x| *x -= mean);
    b
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Critical value of the two-sample KS test at `alpha = 0.01`.
pub fn ks_critical_001(n1: usize, n2: usize) -> f64 {
    1.628 * ((n1 + n2) as f64 / (n1 * n2) as f64).sqrt()
}

/// Counts, over every coefficient vector of a degree `< k` polynomial, how
/// often each value tuple appears at the given distinct points. Uniform
/// independence means every tuple appears exactly `q^(k - t)` times.
pub fn tuple_counts<F: Field>(k: usize, points: &[u32]) -> Vec<u64> {
    let q = F::ORDER;
    let t = points.len();
    let mut counts = vec![0u64; (q as usize).pow(t as u32)];
    let total = (q as u64).pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let coeffs: Vec<F> = (0..k)
            .map(|_| {
                let v = (c % q as u64) as u32;
                c /= q as u64;
                F::from_u32(v)
            })
            .collect();
        let h = PolyHash::from_coeffs(coeffs);
        let idx = points.iter().fold(0usize, |acc, &x| acc * q as usize + h.eval(F::from_u32(x)).to_u32() as usize);
        counts[idx] += 1;
    }
    counts
}

/// Exhaustive `t`-wise uniformity for `t <= min(k, 3)`.
pub fn exhaustively_independent<F: Field>(k: usize) -> bool {
    let q = F::ORDER;
    let expected = |t: usize| (q as u64).pow((k - t) as u32);
    for a in 0..q {
        if tuple_counts::<F>(k, &[a]).iter().any(|&c| c != expected(1)) {
            return false;
        }
        for b in a + 1..q {
            if tuple_counts::<F>(k, &[a, b]).iter().any(|&c| c != expected(2)) {
                return false;
            }
            if k >= 3 {
                for c in b + 1..q {
                    if tuple_counts::<F>(k, &[a, b, c]).iter().any(|&n| n != expected(3)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}
