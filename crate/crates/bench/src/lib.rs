//! Inputs shared by the benchmarks.

use sparsekit::{gen, WeightedGraph};

/// Named benchmark graph.
pub struct Fixture {
    pub name: String,
    pub graph: WeightedGraph,
}

/// Dense and sparse random graphs at a few sizes, weights in `[1, 2]`.
pub fn random_fixtures(sizes: &[usize]) -> Vec<Fixture> {
    let mut out = Vec::new();
    for &n in sizes {
        out.push(Fixture { name: format!("gnp-{n}-0.5"), graph: gen::erdos_renyi(n, 0.5, 1.0, 2.0, n as u64) });
        let m = 8 * n;
        out.push(Fixture { name: format!("connected-{n}-{m}"), graph: gen::random_connected(n, m, 1.0, 2.0, n as u64) });
    }
    out
}

/// Right-hand side with zero sum, so it lies in the image of a connected
/// Laplacian.
pub fn balanced_rhs(n: usize) -> Vec<f64> {
    let mut b: Vec<f64> = (0..n).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
    let mean = b.iter().sum::<f64>() / n.max(1) as f64;
    b.iter_mut().for_each(|x| *x -= mean);
    b
}
