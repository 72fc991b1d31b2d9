//! `sparsekit` command-line front end.
//!
//! Every command prints one JSON stats record to stdout (or `--stats`).
//! Exit codes: 0 success, 1 error, 2 verification failure.

mod stats;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use sparsekit::hardgen::{audit_sparsifier_recovery, build_hidden_graph, gen_valid_input};
use sparsekit::io::{edge_list_string, read_graph_file, read_matrix_market, read_vector, vector_string};
use sparsekit::resistance::{build_resistance_oracle, ResistanceOracle};
use sparsekit::solver::{bottom_eigs, min_cut_approx, sdd_solve, solve_laplacian, solve_via_sparsifier, stoer_wagner, DEFAULT_TOL};
use sparsekit::sparsify::{refined_run, BitSource};
use sparsekit::{build_spanner, gen, ks_sparsify, verify_cuts, verify_spectral, SddSystem, SolverError, SparsifyConfig, WeightedGraph};

use stats::{Stats, Timer};

/// Used when neither `--seed` nor `SPARSEKIT_SEED` is given.
const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser)]
#[command(name = "sparsekit", version, about = "Spectral graph sparsification and its applications")]
struct Cli {
    /// Write the stats record here instead of stdout.
    #[arg(long, global = true)]
    stats: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SeedArg {
    #[arg(long, env = "SPARSEKIT_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Clone)]
struct Tuning {
    /// Packing constant: r = ceil(c_pack log^2 n / eps^2) spanners per round.
    #[arg(long, default_value_t = 1.0)]
    c_pack: f64,
    /// Sampling constant C in p_e = min(1, C w_e R_e log n / eps^2).
    #[arg(long = "C", alias = "sample-c", default_value_t = 4.0)]
    sample_c: f64,
    #[arg(long, default_value_t = 2.0)]
    log_base: f64,
    /// Spanner levels per packing; ceil(log2 n) when unset.
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, value_enum, default_value_t = Bits::Kwise)]
    bits: Bits,
}

#[derive(ValueEnum, Clone, Copy)]
enum Bits {
    Kwise,
    Random,
}

impl Tuning {
    fn config(&self) -> Result<SparsifyConfig> {
        for (name, v) in [("c-pack", self.c_pack), ("C", self.sample_c)] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("--{name} must be positive, got {v}");
            }
        }
        if !(self.log_base > 1.0 && self.log_base.is_finite()) {
            bail!("--log-base must exceed 1, got {}", self.log_base);
        }
        Ok(SparsifyConfig {
            c_pack: self.c_pack,
            sample_c: self.sample_c,
            log_base: self.log_base,
            levels: self.levels,
            bits: match self.bits {
                Bits::Kwise => BitSource::KWise,
                Bits::Random => BitSource::FullyRandom,
            },
            ..SparsifyConfig::default()
        })
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum MethodArg {
    Ks,
    Refined,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Sparsify a graph; writes OUT and the provenance sidecar OUT.json.
    Sparsify {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Refined)]
        method: MethodArg,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        tuning: Tuning,
        /// Check the result spectrally; exit 2 if it fails.
        #[arg(long)]
        verify: bool,
        input: PathBuf,
        output: PathBuf,
    },
    /// Check that H is an eps-spectral sparsifier of G.
    Verify {
        #[arg(long)]
        epsilon: f64,
        /// Also test this many random cuts plus every singleton; all must
        /// be within eps.
        #[arg(long, default_value_t = 0)]
        cuts: usize,
        #[command(flatten)]
        seed: SeedArg,
        graph: PathBuf,
        sparsifier: PathBuf,
    },
    /// Build a (2k-1)-spanner.
    Spanner {
        /// Levels; ceil(log2 n) when unset.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
        input: PathBuf,
        output: PathBuf,
    },
    /// Effective resistance oracles.
    #[command(subcommand)]
    Resistance(ResistanceCommand),
    /// Linear solvers.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Global minimum cut.
    Mincut {
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Run Stoer-Wagner on the input directly.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        tuning: Tuning,
        input: PathBuf,
    },
    /// Smallest Laplacian eigenpairs.
    Eigs {
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        tuning: Tuning,
        input: PathBuf,
        /// Write the eigenvectors here, one per line.
        #[arg(long)]
        vectors: Option<PathBuf>,
    },
    /// Query-cost and recovery measurements.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Erdos-Renyi G(n, p), or a connected graph with exactly m edges.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "m", required_unless_present = "m")]
        p: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        w_lo: f64,
        #[arg(long, default_value_t = 1.0)]
        w_hi: f64,
        #[command(flatten)]
        seed: SeedArg,
        output: PathBuf,
    },
    /// Hidden lower-bound instance G(x) for a random valid x.
    Hard {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        epsilon: f64,
        #[command(flatten)]
        seed: SeedArg,
        /// Write x as JSON instead of the materialized graph.
        #[arg(long)]
        handle: bool,
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum ResistanceCommand {
    /// Build a sketch oracle with ceil(24 log2(n) / eps^2) rows.
    Build {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Store the exact embedding instead of a sketch.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        seed: SeedArg,
        input: PathBuf,
        oracle: PathBuf,
    },
    /// Query node pairs: `s t [s t ...]`.
    Query {
        oracle: PathBuf,
        #[arg(required = true, num_args = 2..)]
        pairs: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum SolveCommand {
    /// L x = b, on a sparsifier unless --exact.
    Laplacian {
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        tuning: Tuning,
        graph: PathBuf,
        rhs: PathBuf,
        output: PathBuf,
    },
    /// A x = b for a symmetric diagonally dominant A in Matrix Market form.
    Sdd {
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        tuning: Tuning,
        matrix: PathBuf,
        rhs: PathBuf,
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Ledger of the refined pipeline on random graphs with n fixed and
    /// m = n 2^j for j = 1..=max_j.
    Scaling {
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        max_j: u32,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Fraction of hidden strings a sparsifier of G(x) reveals.
    Hard {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 512)]
        m: usize,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        /// Accuracy of the sparsifier run on G(x).
        #[arg(long, default_value_t = 0.5)]
        sparsify_epsilon: f64,
        #[arg(long, default_value_t = 5)]
        trials: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        tuning: Tuning,
    },
}

/// Outcome of a command: its stats and whether a verification failed.
struct Run {
    stats: Stats,
    verify_failed: bool,
}

impl From<Stats> for Run {
    fn from(stats: Stats) -> Self {
        Run { stats, verify_failed: false }
    }
}

fn read_graph(path: &Path) -> Result<WeightedGraph> {
    read_graph_file(path).with_context(|| format!("reading {}", path.display()))
}

fn read_vec(path: &Path) -> Result<Vec<f64>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_vector(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// `path` with `.json` appended to the full file name.
fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        bail!("--epsilon must lie in (0, 1], got {eps}");
    }
    Ok(())
}

fn graph_summary(g: &WeightedGraph) -> serde_json::Value {
    json!({ "n": g.n(), "m": g.m() })
}

fn run(command: Command) -> Result<Run> {
    let mut timer = Timer::start();
    let mut run: Run = match command {
        Command::Gen(GenCommand::Random { n, p, m, w_lo, w_hi, seed, output }) => {
            if !(w_lo > 0.0 && w_lo <= w_hi) {
                bail!("weights need 0 < w-lo <= w-hi");
            }
            let g = timer.phase("generate", || match (p, m) {
                (Some(p), _) if (0.0..=1.0).contains(&p) => Ok(gen::erdos_renyi(n, p, w_lo, w_hi, seed.seed)),
                (Some(p), _) => bail!("--p must lie in [0, 1], got {p}"),
                (None, Some(m)) if n >= 1 && m + 1 >= n && m <= n * (n - 1) / 2 => {
                    Ok(gen::random_connected(n, m, w_lo, w_hi, seed.seed))
                }
                (None, Some(m)) => bail!("a connected simple graph on {n} nodes needs n-1 <= m <= n(n-1)/2, got {m}"),
                (None, None) => unreachable!("clap requires --p or --m"),
            })?;
            timer.phase("write", || write_text(&output, &edge_list_string(&g)))?;
            let mut stats = Stats::new("gen random");
            stats.seed = Some(seed.seed);
            stats.result = graph_summary(&g);
            stats.into()
        }
        Command::Gen(GenCommand::Hard { n, m, epsilon, seed, handle, output }) => {
            let x = timer.phase("generate", || gen_valid_input(n, m, epsilon, seed.seed))?;
            let mut stats = Stats::new("gen hard");
            stats.seed = Some(seed.seed);
            stats.epsilon = Some(epsilon);
            stats.warnings = x.warnings.clone();
            let nonzero = x.nonzero_strings();
            if handle {
                let text = serde_json::to_string(&x)?;
                timer.phase("write", || write_text(&output, &text))?;
                stats.result = json!({ "n": n, "m": m, "nonzero_strings": nonzero, "handle": true });
            } else {
                let g = timer.phase("generate", || build_hidden_graph(x)?.materialize())?;
                timer.phase("write", || write_text(&output, &edge_list_string(&g)))?;
                stats.result = json!({ "n": g.n(), "m": g.m(), "nonzero_strings": nonzero, "handle": false });
            }
            stats.into()
        }
        Command::Sparsify { epsilon, method, seed, tuning, verify, input, output } => {
            check_epsilon(epsilon)?;
            let cfg = tuning.config()?;
            let g = timer.phase("read", || read_graph(&input))?;
            let s = timer.phase("sparsify", || match method {
                MethodArg::Ks => ks_sparsify(&g, epsilon, seed.seed, &cfg),
                MethodArg::Refined => refined_run(&g, epsilon, seed.seed, &cfg).map(|r| r.output),
            })?;
            let h = s.to_graph(&g);
            timer.phase("write", || -> Result<()> {
                write_text(&output, &edge_list_string(&h))?;
                write_text(&sidecar(&output), &serde_json::to_string_pretty(&s.provenance)?)
            })?;
            let mut stats = Stats::new("sparsify");
            stats.seed = Some(seed.seed);
            stats.epsilon = Some(epsilon);
            stats.ledger = s.ledger;
            stats.provenance = Some(s.provenance.clone());
            stats.warnings = s.warnings.clone();
            let mut result = json!({ "input": graph_summary(&g), "output": graph_summary(&h) });
            let mut verify_failed = false;
            if verify {
                let report = timer.phase("verify", || verify_spectral(&g, &h, epsilon))?;
                verify_failed = !report.pass;
                result["verify"] = serde_json::to_value(report)?;
            }
            stats.result = result;
            Run { stats, verify_failed }
        }
        Command::Verify { epsilon, cuts, seed, graph, sparsifier } => {
            check_epsilon(epsilon)?;
            let g = timer.phase("read", || read_graph(&graph))?;
            let h = timer.phase("read", || read_graph(&sparsifier))?;
            if g.n() != h.n() {
                bail!("node counts differ: {} vs {}", g.n(), h.n());
            }
            let report = timer.phase("spectral", || verify_spectral(&g, &h, epsilon))?;
            let mut result = serde_json::to_value(report)?;
            let mut pass = report.pass;
            if cuts > 0 {
                let fraction = timer.phase("cuts", || verify_cuts(&g, &h, epsilon, cuts, seed.seed));
                pass &= fraction == 1.0;
                result["cut_trials"] = json!(cuts);
                result["cuts_within_eps"] = json!(fraction);
            }
            let mut stats = Stats::new("verify");
            stats.epsilon = Some(epsilon);
            if cuts > 0 {
                stats.seed = Some(seed.seed);
            }
            stats.result = result;
            Run { stats, verify_failed: !pass }
        }
        Command::Spanner { k, seed, input, output } => {
            let g = timer.phase("read", || read_graph(&input))?;
            let k = k.unwrap_or_else(|| sparsekit::spanner::default_levels(g.n()));
            if k == 0 {
                bail!("--k must be at least 1");
            }
            let s = timer.phase("spanner", || build_spanner(&g, k, seed.seed));
            let kept: Vec<(usize, f64)> = s.edges.iter().map(|&id| (id, g.edges()[id].w)).collect();
            let h = g.reweighted_subgraph(&kept);
            timer.phase("write", || write_text(&output, &edge_list_string(&h)))?;
            let mut stats = Stats::new("spanner");
            stats.seed = Some(seed.seed);
            stats.ledger = s.ledger;
            stats.result = json!({ "k": k, "stretch": s.stretch(), "input": graph_summary(&g), "edges": s.len() });
            stats.into()
        }
        Command::Resistance(ResistanceCommand::Build { epsilon, tol, exact, seed, input, oracle }) => {
            check_epsilon(epsilon)?;
            let g = timer.phase("read", || read_graph(&input))?;
            let o = timer.phase("build", || {
                if exact {
                    ResistanceOracle::exact(&g)
                } else {
                    build_resistance_oracle(&g, epsilon, seed.seed, tol)
                }
            })?;
            timer.phase("write", || -> Result<()> {
                let file = File::create(&oracle).with_context(|| format!("creating {}", oracle.display()))?;
                let mut out = BufWriter::new(file);
                o.write(&mut out)?;
                out.flush()?;
                Ok(())
            })?;
            let mut stats = Stats::new("resistance build");
            stats.seed = Some(seed.seed);
            stats.epsilon = Some(epsilon);
            stats.result = json!({ "n": o.n(), "rows": o.rows(), "kind": o.kind() });
            stats.into()
        }
        Command::Resistance(ResistanceCommand::Query { oracle, pairs }) => {
            if pairs.len() % 2 != 0 {
                bail!("pairs must come as `s t`, got {} ids", pairs.len());
            }
            let o = timer.phase("read", || -> Result<ResistanceOracle> {
                let file = File::open(&oracle).with_context(|| format!("opening {}", oracle.display()))?;
                Ok(ResistanceOracle::read(BufReader::new(file))?)
            })?;
            let mut answers = Vec::new();
            for p in pairs.chunks(2) {
                let (s, t) = (p[0], p[1]);
                if s >= o.n() || t >= o.n() {
                    bail!("pair ({s}, {t}) out of range for {} nodes", o.n());
                }
                answers.push(json!({ "s": s, "t": t, "resistance": o.query(s, t) }));
            }
            let mut stats = Stats::new("resistance query");
            stats.epsilon = Some(o.header().epsilon);
            stats.seed = Some(o.header().seed);
            stats.result = json!({ "queries": answers });
            stats.into()
        }
        Command::Solve(SolveCommand::Laplacian { epsilon, exact, seed, tuning, graph, rhs, output }) => {
            check_epsilon(epsilon)?;
            let cfg = tuning.config()?;
            let g = timer.phase("read", || read_graph(&graph))?;
            let b = timer.phase("read", || read_vec(&rhs))?;
            let r = timer.phase("solve", || {
                if exact {
                    solve_laplacian(&g, &b, DEFAULT_TOL)
                } else {
                    solve_via_sparsifier(&g, &b, epsilon, seed.seed, &cfg)
                }
            });
            let mut stats = Stats::new("solve laplacian");
            if !exact {
                stats.seed = Some(seed.seed);
                stats.epsilon = Some(epsilon);
            }
            finish_solve(&mut timer, &mut stats, r, &output)?;
            stats.into()
        }
        Command::Solve(SolveCommand::Sdd { epsilon, seed, tuning, matrix, rhs, output }) => {
            check_epsilon(epsilon)?;
            let cfg = tuning.config()?;
            let entries = timer.phase("read", || -> Result<_> {
                let file = File::open(&matrix).with_context(|| format!("opening {}", matrix.display()))?;
                read_matrix_market(BufReader::new(file)).with_context(|| format!("reading {}", matrix.display()))
            })?;
            let b = timer.phase("read", || read_vec(&rhs))?;
            let a = SddSystem::new(entries.diag, &entries.off, b)?;
            let r = timer.phase("solve", || sdd_solve(&a, epsilon, seed.seed, &cfg));
            let mut stats = Stats::new("solve sdd");
            stats.seed = Some(seed.seed);
            stats.epsilon = Some(epsilon);
            finish_solve(&mut timer, &mut stats, r, &output)?;
            stats.into()
        }
        Command::Mincut { epsilon, exact, seed, tuning, input } => {
            check_epsilon(epsilon)?;
            let cfg = tuning.config()?;
            let g = timer.phase("read", || read_graph(&input))?;
            let c = timer.phase("mincut", || {
                if exact {
                    stoer_wagner(&g)
                } else {
                    min_cut_approx(&g, epsilon, seed.seed, &cfg)
                }
            })?;
            let mut stats = Stats::new("mincut");
            if !exact {
                stats.seed = Some(seed.seed);
                stats.epsilon = Some(epsilon);
            }
            stats.ledger = c.ledger;
            stats.result = serde_json::to_value(c.report())?;
            stats.into()
        }
        Command::Eigs { k, epsilon, seed, tuning, input, vectors } => {
            check_epsilon(epsilon)?;
            let cfg = tuning.config()?;
            let g = timer.phase("read", || read_graph(&input))?;
            let e = timer.phase("eigs", || bottom_eigs(&g, k, epsilon, seed.seed, &cfg))?;
            if let Some(path) = vectors {
                let text: String = e
                    .vectors
                    .iter()
                    .map(|v| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ") + "\n")
                    .collect();
                timer.phase("write", || write_text(&path, &text))?;
            }
            let mut stats = Stats::new("eigs");
            stats.seed = Some(seed.seed);
            stats.epsilon = Some(epsilon);
            stats.ledger = e.ledger;
            stats.result = json!({
                "values": e.values,
                "sparsifier_edges": e.sparsifier_edges,
                "rounds": e.rounds,
            });
            stats.into()
        }
        Command::Bench(BenchCommand::Scaling { n, max_j, epsilon, seed, tuning }) => {
            check_epsilon(epsilon)?;
            let cfg = tuning.config()?;
            let mut rows = Vec::new();
            let mut total = sparsekit::CostLedger::default();
            for j in 1..=max_j {
                let m = n << j;
                if m > n * (n - 1) / 2 {
                    break;
                }
                let g = gen::random_connected(n, m, 1.0, 2.0, seed.seed.wrapping_add(j as u64));
                let s = timer.phase("sparsify", || refined_run(&g, epsilon, seed.seed, &cfg))?.output;
                total.combine(&s.ledger);
                rows.push(json!({
                    "n": n,
                    "m": g.m(),
                    "edges": s.len(),
                    "classical_queries": s.ledger.classical_queries,
                    "modeled_quantum_queries": s.ledger.modeled_quantum_queries,
                    "sqrt_mn_over_eps": ((g.m() * n) as f64).sqrt() / epsilon,
                }));
            }
            let mut stats = Stats::new("bench scaling");
            stats.seed = Some(seed.seed);
            stats.epsilon = Some(epsilon);
            stats.ledger = total;
            stats.result = json!({ "runs": rows });
            stats.into()
        }
        Command::Bench(BenchCommand::Hard { n, m, epsilon, sparsify_epsilon, trials, seed, tuning }) => {
            check_epsilon(sparsify_epsilon)?;
            let cfg = tuning.config()?;
            let mut rows = Vec::new();
            let mut total = sparsekit::CostLedger::default();
            let mut warnings = Vec::new();
            for t in 0..trials {
                let s_t = seed.seed.wrapping_add(t);
                let x = gen_valid_input(n, m, epsilon, s_t)?;
                warnings.extend(x.warnings.iter().cloned());
                let g = build_hidden_graph(x.clone())?.materialize()?;
                let s = timer.phase("sparsify", || refined_run(&g, sparsify_epsilon, s_t, &cfg))?.output;
                total.combine(&s.ledger);
                let fraction = audit_sparsifier_recovery(&x, &s.to_graph(&g));
                rows.push(json!({ "seed": s_t, "edges": s.len(), "recovered_fraction": fraction }));
            }
            warnings.dedup();
            let mut stats = Stats::new("bench hard");
            stats.seed = Some(seed.seed);
            stats.epsilon = Some(sparsify_epsilon);
            stats.ledger = total;
            stats.warnings = warnings;
            stats.result = json!({ "n": n, "m": m, "instance_epsilon": epsilon, "trials": rows });
            stats.into()
        }
    };
    run.stats.timings = timer.finish();
    Ok(run)
}

/// Writes `x` and records the solve; a non-converged solve is an error.
fn finish_solve(
    timer: &mut Timer,
    stats: &mut Stats,
    r: Result<sparsekit::SolveResult, SolverError>,
    output: &Path,
) -> Result<()> {
    let r = match r {
        Ok(r) => r,
        Err(SolverError::NoConvergence(r)) => {
            stats.warnings.push(format!("no convergence after {} iterations", r.iterations));
            bail!("solver did not converge (residual {:.3e})", r.residual);
        }
        Err(e) => return Err(e.into()),
    };
    timer.phase("write", || write_text(output, &vector_string(&r.x)))?;
    stats.ledger = r.ledger;
    stats.result = json!({
        "n": r.x.len(),
        "iterations": r.iterations,
        "residual": r.residual,
        "converged": r.converged,
        "projected": r.projected,
    });
    Ok(())
}

fn emit(stats: &Stats, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(stats)? + "\n";
    match path {
        Some(p) => write_text(p, &text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command).and_then(|r| emit(&r.stats, cli.stats.as_deref()).map(|_| r.verify_failed)) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
