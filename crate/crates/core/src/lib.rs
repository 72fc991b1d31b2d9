//! Spectral graph sparsification and its applications.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`], [`io`], [`gen`]: weighted graphs, file formats, generators.
//! * [`oracle`]: query-counted adjacency access, k-wise independent bits,
//!   implicit weights and the modeled quantum search cost.
//! * [`paths`]: Dijkstra, `minfind` and the partitioned shortest-path tree.
//! * [`spanner`]: Thorup-Zwick spanners and spanner packings.
//! * [`sparsify`]: half-sparsification, the iterated implicit-weight
//!   sparsifier, resistance sampling and the refined pipeline.
//! * [`resistance`]: exact and sketched effective resistances.
//! * [`solver`]: Laplacian and SDD solving, eigenpairs, min cut.
//! * [`hardgen`]: lower-bound instance generators.
//!
//! Every randomized entry point takes an explicit `u64` seed and is
//! deterministic given it.

pub mod dense;
pub mod gen;
pub mod graph;
pub mod hardgen;
pub mod io;
pub mod oracle;
pub mod paths;
pub mod resistance;
pub mod rng;
pub mod solver;
pub mod spanner;
pub mod sparsify;

pub use graph::{AdjacencyAccess, Components, Cut, Edge, EdgeVector, GraphError, Neighbor, ReweightedView, WeightedGraph};
pub use oracle::{grover_cost, CostLedger, KWiseBits, QueryOracle};
pub use paths::{dijkstra, minfind, spt_partitioned, ShortestPathTree};
pub use resistance::{ResistanceOracle, ResistanceError};
pub use solver::{SddSystem, SolveResult, SolverError};
pub use spanner::{build_spanner, spanner_packing, Spanner, SpannerPacking};
pub use sparsify::{
    half_sparsify, ks_sparsify, refined_sparsify, resistance_sample, verify_cuts, verify_spectral, SparsifyConfig,
    SparsifyError, Sparsifier, SpectralReport,
};
