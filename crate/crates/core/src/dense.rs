//! Dense linear algebra for verification at desk scale.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::graph::{GraphError, WeightedGraph};

/// Eigenvalues ascending with matching eigenvector columns.
pub fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let n = eig.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

/// Pseudoinverse of a symmetric PSD matrix whose kernel has dimension
/// `kernel_dim`: the `kernel_dim` smallest eigenvalues are treated as zero.
pub fn psd_pseudo_inverse(m: DMatrix<f64>, kernel_dim: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let (values, vectors) = sorted_eigen(m);
    let mut out = DMatrix::zeros(n, n);
    for (c, &lambda) in values.iter().enumerate().skip(kernel_dim) {
        let col = vectors.column(c);
        out += (col * col.transpose()) / lambda;
    }
    out
}

/// `L_G^+`.
pub fn laplacian_pinv(g: &WeightedGraph) -> Result<DMatrix<f64>, GraphError> {
    let l = g.dense_laplacian()?;
    Ok(psd_pseudo_inverse(l, g.components().count))
}

/// Extreme eigenvalues of `A^{+/2} B A^{+/2}` on the image of `A`, where
/// `A` is PSD with kernel dimension `kernel_dim`.
pub fn pencil_extremes(a: DMatrix<f64>, b: &DMatrix<f64>, kernel_dim: usize) -> (f64, f64) {
    let n = a.nrows();
    if kernel_dim >= n {
        return (1.0, 1.0);
    }
    let (values, vectors) = sorted_eigen(a);
    let keep = n - kernel_dim;
    let mut basis = DMatrix::zeros(n, keep);
    for c in 0..keep {
        let scale = values[kernel_dim + c].sqrt().recip();
        basis.set_column(c, &(vectors.column(kernel_dim + c) * scale));
    }
    let mut reduced = basis.transpose() * b * &basis;
    // symmetrize against rounding
    reduced = (&reduced + reduced.transpose()) * 0.5;
    let (vals, _) = sorted_eigen(reduced);
    (vals[0], vals[keep - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn pinv_matches_svd() {
        let g = gen::erdos_renyi(25, 0.3, 1.0, 2.0, 8);
        let ours = laplacian_pinv(&g).unwrap();
        let reference = g.dense_laplacian().unwrap().pseudo_inverse(1e-9).unwrap();
        assert!((ours - reference).amax() < 1e-8);
    }

    #[test]
    fn pencil_of_scaled_graph() {
        let g = gen::cycle(10, 1.0);
        let l = g.dense_laplacian().unwrap();
        let (lo, hi) = pencil_extremes(l.clone(), &(&l * 1.5), 1);
        assert!((lo - 1.5).abs() < 1e-10 && (hi - 1.5).abs() < 1e-10);
    }
}
