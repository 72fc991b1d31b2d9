//! Linear solving and spectral applications built on sparsifiers.

mod eigs;
mod linear;
mod mincut;
mod sdd;

use serde::Serialize;
use thiserror::Error;

pub use eigs::{bottom_eigs, EigenPairs};
pub use linear::{pcg, solve_laplacian, solve_via_sparsifier, Deflation, LinearOperator, DEFAULT_TOL};
pub use mincut::{min_cut_approx, stoer_wagner, MinCut, MinCutReport};
pub use sdd::{gremban_reduce, sdd_solve, sddm_sparsify, Gremban, SddSystem, Sddm};

use crate::graph::GraphError;
use crate::oracle::CostLedger;
use crate::sparsify::SparsifyError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `||A x - b|| / ||b||` recomputed from the returned `x` (0 when `b` is 0).
    pub residual: f64,
    pub converged: bool,
    /// The right-hand side had a component in the kernel that was removed.
    pub projected: bool,
    /// Queries spent building a sparsifier; zero for a direct solve.
    pub ledger: CostLedger,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("no convergence after {} iterations (residual {:.3e})", .0.iterations, .0.residual)]
    NoConvergence(Box<SolveResult>),
    #[error("vector of length {got} does not match dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("row {row} is not weakly diagonally dominant")]
    NotSdd { row: usize },
    #[error("positive off-diagonal entry at ({row}, {col})")]
    NotSddm { row: usize, col: usize },
    #[error("invalid matrix entry {value} at ({row}, {col})")]
    BadEntry { row: usize, col: usize, value: f64 },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("k = {k} must be below the node count {n}")]
    BadK { k: usize, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sparsify(#[from] SparsifyError),
}
