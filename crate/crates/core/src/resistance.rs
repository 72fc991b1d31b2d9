//! Effective resistances.
//!
//! `R(s, t) = (chi_s - chi_t)^T L^+ (chi_s - chi_t)`. The sketch oracle stores
//! a `q x n` matrix `Z = Q W^{1/2} B L^+` with random `+-1/sqrt(q)` entries in
//! `Q`, so that `||Z (chi_s - chi_t)||^2` approximates `R(s, t)`.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense;
use crate::graph::{GraphError, WeightedGraph};
use crate::rng::{rng_from, STREAM_SKETCH};
use crate::solver::{pcg, solve_laplacian, Deflation, SolverError};

#[derive(Debug, Error)]
pub enum ResistanceError {
    #[error("nodes {s} and {t} lie in different components")]
    DifferentComponents { s: usize, t: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("epsilon {0} outside (0, 1]")]
    BadEpsilon(f64),
    #[error("node {v} out of range for {n} nodes")]
    NodeOutOfRange { v: usize, n: usize },
    #[error("demand does not sum to zero on every component (largest sum {0:.3e})")]
    UnbalancedDemand(f64),
    #[error("demand of length {got} does not match {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bad oracle file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(Box<SolverError>),
}

impl From<SolverError> for ResistanceError {
    fn from(e: SolverError) -> Self {
        ResistanceError::Solver(Box::new(e))
    }
}

/// Exact resistances from a dense pseudoinverse.
#[derive(Debug, Clone)]
pub struct DenseResistance {
    pinv: DMatrix<f64>,
    label: Vec<usize>,
}

impl DenseResistance {
    pub fn new(g: &WeightedGraph) -> Result<Self, ResistanceError> {
        Ok(DenseResistance { pinv: dense::laplacian_pinv(g)?, label: g.components().label })
    }

    pub fn query(&self, s: usize, t: usize) -> Result<f64, ResistanceError> {
        let n = self.label.len();
        for v in [s, t] {
            if v >= n {
                return Err(ResistanceError::NodeOutOfRange { v, n });
            }
        }
        if self.label[s] != self.label[t] {
            return Err(ResistanceError::DifferentComponents { s, t });
        }
        let p = &self.pinv;
        Ok((p[(s, s)] + p[(t, t)] - 2.0 * p[(s, t)]).max(0.0))
    }

    pub fn pinv(&self) -> &DMatrix<f64> {
        &self.pinv
    }
}

pub fn exact_resistance(g: &WeightedGraph, s: usize, t: usize) -> Result<f64, ResistanceError> {
    DenseResistance::new(g)?.query(s, t)
}

/// Number of sketch rows, `ceil(24 log(n) / eps^2)`.
pub fn sketch_rows(n: usize, eps: f64, log_base: f64) -> usize {
    let log_n = (n.max(2) as f64).ln() / log_base.ln();
    (24.0 * log_n / (eps * eps)).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    /// Random projection with `q` rows.
    Sketch,
    /// Exact embedding `Lambda^{-1/2} U^T` of the pseudoinverse.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleHeader {
    pub n: usize,
    pub q: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub tol: f64,
    pub kind: OracleKind,
}

/// Embedding whose squared column distances are resistance estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceOracle {
    header: OracleHeader,
    /// Column-major: column `v` is `cols[v*q .. (v+1)*q]`.
    cols: Vec<f64>,
}

/// Builds the sketch oracle with `q = ceil(24 log2(n) / eps^2)` rows.
pub fn build_resistance_oracle(
    g: &WeightedGraph,
    eps: f64,
    seed: u64,
    solver_tol: f64,
) -> Result<ResistanceOracle, ResistanceError> {
    let q = sketch_rows(g.n(), eps, 2.0);
    ResistanceOracle::sketch(g, eps, q, seed, solver_tol)
}

impl ResistanceOracle {
    /// Sketch with an explicit row count.
    pub fn sketch(g: &WeightedGraph, eps: f64, q: usize, seed: u64, tol: f64) -> Result<Self, ResistanceError> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(ResistanceError::BadEpsilon(eps));
        }
        if !g.is_connected() {
            return Err(ResistanceError::Disconnected);
        }
        let n = g.n();
        let scale = 1.0 / (q as f64).sqrt();
        let sqrt_w: Vec<f64> = g.edges().iter().map(|e| e.w.sqrt()).collect();
        let kernel = Deflation::laplacian(g);
        let rows: Vec<Vec<f64>> = (0..q)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_from(seed, &[STREAM_SKETCH, i as u64]);
                let mut y = vec![0.0; n];
                for (e, edge) in g.edges().iter().enumerate() {
                    let s = if rng.random::<bool>() { scale } else { -scale };
                    let c = s * sqrt_w[e];
                    y[edge.u] += c;
                    y[edge.v] -= c;
                }
                pcg(g, &y, tol, 20 * n.max(1), &kernel).map(|r| r.x)
            })
            .collect::<Result<_, _>>()?;
        let mut cols = vec![0.0; n * q];
        for (i, row) in rows.iter().enumerate() {
            for v in 0..n {
                cols[v * q + i] = row[v];
            }
        }
        let header = OracleHeader { n, q, epsilon: eps, seed, tol, kind: OracleKind::Sketch };
        Ok(ResistanceOracle { header, cols })
    }

    /// Exact embedding from a dense eigendecomposition; `q = n - 1`.
    pub fn exact(g: &WeightedGraph) -> Result<Self, ResistanceError> {
        if !g.is_connected() {
            return Err(ResistanceError::Disconnected);
        }
        let n = g.n();
        let (values, vectors) = dense::sorted_eigen(g.dense_laplacian()?);
        let q = n.saturating_sub(1);
        let mut cols = vec![0.0; n * q];
        for i in 0..q {
            let scale = values[i + 1].sqrt().recip();
            for v in 0..n {
                cols[v * q + i] = vectors[(v, i + 1)] * scale;
            }
        }
        let header = OracleHeader { n, q, epsilon: 0.0, seed: 0, tol: 0.0, kind: OracleKind::Exact };
        Ok(ResistanceOracle { header, cols })
    }

    pub fn header(&self) -> &OracleHeader {
        &self.header
    }

    pub fn n(&self) -> usize {
        self.header.n
    }

    pub fn rows(&self) -> usize {
        self.header.q
    }

    pub fn kind(&self) -> OracleKind {
        self.header.kind
    }

    /// `||Z chi_s - Z chi_t||^2`.
    pub fn query(&self, s: usize, t: usize) -> f64 {
        let q = self.header.q;
        let (a, b) = (&self.cols[s * q..(s + 1) * q], &self.cols[t * q..(t + 1) * q]);
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    /// Writes a one-line JSON header followed by the little-endian `f64`
    /// entries, column by column.
    pub fn write<W: Write>(&self, mut out: W) -> Result<(), ResistanceError> {
        let header = serde_json::to_string(&self.header).map_err(|e| ResistanceError::Format(e.to_string()))?;
        out.write_all(header.as_bytes())?;
        out.write_all(b"\n")?;
        let mut buf = Vec::with_capacity(8 * self.cols.len());
        for v in &self.cols {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read<R: BufRead>(mut input: R) -> Result<Self, ResistanceError> {
        let mut line = String::new();
        input.read_line(&mut line)?;
        let header: OracleHeader =
            serde_json::from_str(line.trim_end()).map_err(|e| ResistanceError::Format(e.to_string()))?;
        let len = header
            .n
            .checked_mul(header.q)
            .ok_or_else(|| ResistanceError::Format("dimensions overflow".into()))?;
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        if bytes.len() != 8 * len {
            return Err(ResistanceError::Format(format!("expected {} data bytes, found {}", 8 * len, bytes.len())));
        }
        let cols = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        Ok(ResistanceOracle { header, cols })
    }
}

pub fn query_resistance(o: &ResistanceOracle, s: usize, t: usize) -> f64 {
    o.query(s, t)
}

/// Expected round-trip time of a random walk, `2 W R`.
pub fn commute_time(g: &WeightedGraph, r: f64) -> f64 {
    2.0 * g.total_weight() * r
}

/// `j^T L^+ j` for a demand vector balanced on every component.
pub fn dissipated_power(g: &WeightedGraph, j: &[f64]) -> Result<f64, ResistanceError> {
    if j.len() != g.n() {
        return Err(ResistanceError::LengthMismatch { expected: g.n(), got: j.len() });
    }
    let comps = g.components();
    let mut sums = vec![0.0; comps.count];
    for (v, &jv) in j.iter().enumerate() {
        sums[comps.label[v]] += jv;
    }
    let worst = sums.iter().fold(0.0f64, |a, s| a.max(s.abs()));
    let scale: f64 = j.iter().map(|x| x.abs()).sum();
    if worst > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(ResistanceError::UnbalancedDemand(worst));
    }
    let x = solve_laplacian(g, j, 1e-12)?.x;
    Ok(j.iter().zip(&x).map(|(a, b)| a * b).sum())
}
