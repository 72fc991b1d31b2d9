//! Spectral sparsifiers.
//!
//! * [`half_sparsify`]: one round of spanner packing plus 1/4-sampling.
//! * [`ks_sparsify`]: `T = ceil(log2(m/n))` rounds run on implicit weights;
//!   intermediate graphs are never built, only packing memberships.
//! * [`resistance_sample`]: independent sampling with `p_e ~ w_e R_e`.
//! * [`refined_sparsify`]: rough sparsifier, resistance oracle on it, then
//!   resistance sampling of the original graph.

use std::sync::atomic::{AtomicU8, Ordering};

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense;
use crate::graph::{GraphError, ReweightedView, WeightedGraph, DENSE_LIMIT};
use crate::oracle::{grover_cost, implicit_weight, CostLedger, FullyRandom, KWiseBits, RandomBits};
use crate::resistance::{sketch_rows, ResistanceError, ResistanceOracle};
use crate::rng::{derive_seed, rng_from, STREAM_COMPONENT, STREAM_REFINED, STREAM_SAMPLE, STREAM_SIEVE};
use crate::spanner::{default_levels, spanner_packing};

#[derive(Debug, Error)]
pub enum SparsifyError {
    #[error("epsilon {0} outside (0, 1]")]
    BadEpsilon(f64),
    #[error("resistance estimate {value} for edge {edge} is not positive and finite")]
    BadEstimate { edge: usize, value: f64 },
    #[error("{got} resistance estimates for {expected} edges")]
    EstimateCount { expected: usize, got: usize },
    #[error("graphs have different connected components")]
    ComponentMismatch,
    #[error("graphs have {g} and {h} nodes")]
    NodeCountMismatch { g: usize, h: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Resistance(#[from] ResistanceError),
}

/// Where the sieve bits `r_i` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BitSource {
    KWise,
    FullyRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifyConfig {
    /// Packing count constant: `r = ceil(c_pack * log^2(n) / eps^2)`.
    pub c_pack: f64,
    /// Sampling constant `C` in `p_e = min(1, C w_e R_e log(n) / eps^2)`.
    pub sample_c: f64,
    /// Accuracy of the rough sparsifier in the refined pipeline.
    pub eps_rough: f64,
    /// Accuracy of the resistance oracle in the refined pipeline.
    pub eps_oracle: f64,
    /// Base of every `log n`.
    pub log_base: f64,
    /// Spanner levels; `ceil(log2 n)` when unset.
    pub levels: Option<usize>,
    pub bits: BitSource,
    /// Independence of the sieve bits; `min(m, 2^16)` when unset.
    pub kwise_k: Option<usize>,
    /// Relative residual for the oracle's Laplacian solves.
    pub solver_tol: f64,
    /// Row cap for the sketch oracle when no exact embedding is built.
    pub max_sketch_rows: usize,
}

impl Default for SparsifyConfig {
    fn default() -> Self {
        SparsifyConfig {
            c_pack: 1.0,
            sample_c: 4.0,
            eps_rough: 0.01,
            eps_oracle: 0.01,
            log_base: 2.0,
            levels: None,
            bits: BitSource::KWise,
            kwise_k: None,
            solver_tol: 1e-8,
            max_sketch_rows: 1 << 14,
        }
    }
}

impl SparsifyConfig {
    fn log(&self, n: usize) -> f64 {
        (n.max(2) as f64).ln() / self.log_base.ln()
    }

    /// Spanners per packing at accuracy `eps`.
    pub fn packing_count(&self, n: usize, eps: f64) -> usize {
        let l = self.log(n);
        ((self.c_pack * l * l / (eps * eps)).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Identity,
    Half,
    Ks,
    Sample,
    Refined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: Method,
    pub seed: u64,
    pub epsilon: f64,
    /// Sieving rounds `T`.
    #[serde(rename = "T")]
    pub rounds: usize,
    pub c_pack: f64,
    #[serde(rename = "C")]
    pub sample_c: f64,
    pub log_base: f64,
    /// Union size of each round's packing.
    pub packing_sizes: Vec<usize>,
    /// Refined pipeline: the rough stage was not sparser and `G` was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rough_fallback: Option<bool>,
}

/// A reweighted subgraph of an input graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sparsifier {
    pub n: usize,
    /// `(edge id in G, weight > 0)`, sorted by edge id.
    pub edges: Vec<(usize, f64)>,
    pub provenance: Provenance,
    pub ledger: CostLedger,
    pub warnings: Vec<String>,
}

impl Sparsifier {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Materializes the sparsifier over the node set of `g`.
    pub fn to_graph(&self, g: &WeightedGraph) -> WeightedGraph {
        g.reweighted_subgraph(&self.edges)
    }

    fn identity(g: &WeightedGraph, provenance: Provenance) -> Self {
        let edges = g.edges().iter().enumerate().filter(|(_, e)| e.w > 0.0).map(|(i, e)| (i, e.w)).collect();
        Sparsifier { n: g.n(), edges, provenance, ledger: CostLedger::default(), warnings: Vec::new() }
    }
}

fn check_eps(eps: f64) -> Result<(), SparsifyError> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(SparsifyError::BadEpsilon(eps))
    }
}

fn provenance(method: Method, seed: u64, eps: f64, cfg: &SparsifyConfig) -> Provenance {
    Provenance {
        method,
        seed,
        epsilon: eps,
        rounds: 0,
        c_pack: cfg.c_pack,
        sample_c: cfg.sample_c,
        log_base: cfg.log_base,
        packing_sizes: Vec::new(),
        rough_fallback: None,
    }
}

/// Lazily evaluated sieve bits `r_1..r_T`, each read at most once.
struct SieveBits {
    sources: Sources,
    cache: Vec<Vec<AtomicU8>>,
}

enum Sources {
    KWise(Vec<KWiseBits>),
    Full(Vec<FullyRandom>),
}

impl SieveBits {
    fn new(rounds: usize, m: usize, seed: u64, cfg: &SparsifyConfig) -> Self {
        let seeds = (1..=rounds).map(|i| derive_seed(seed, &[STREAM_SIEVE, i as u64]));
        let sources = match cfg.bits {
            BitSource::KWise => {
                let k = cfg.kwise_k.unwrap_or(m.clamp(1, 1 << 16));
                Sources::KWise(seeds.map(|s| KWiseBits::new(k, s)).collect())
            }
            BitSource::FullyRandom => Sources::Full(seeds.map(|seed| FullyRandom { seed }).collect()),
        };
        let cache = (0..rounds).map(|_| (0..m).map(|_| AtomicU8::new(0)).collect()).collect();
        SieveBits { sources, cache }
    }

    fn bit(&self, round: usize, e: usize) -> bool {
        let slot = &self.cache[round - 1][e];
        match slot.load(Ordering::Relaxed) {
            1 => false,
            2 => true,
            _ => {
                let b = match &self.sources {
                    Sources::KWise(s) => s[round - 1].bit(e as u64),
                    Sources::Full(s) => s[round - 1].bit(e as u64),
                };
                slot.store(if b { 2 } else { 1 }, Ordering::Relaxed);
                b
            }
        }
    }

    fn rounds(&self) -> Vec<Round<'_>> {
        (1..=self.cache.len()).map(|round| Round { bits: self, round }).collect()
    }
}

struct Round<'a> {
    bits: &'a SieveBits,
    round: usize,
}

impl RandomBits for Round<'_> {
    fn bit(&self, index: u64) -> bool {
        self.bits.bit(self.round, index as usize)
    }
}

/// `rounds` sieving rounds at per-round accuracy `eps_round`.
fn sieve(g: &WeightedGraph, eps_round: f64, rounds: usize, seed: u64, cfg: &SparsifyConfig, prov: &mut Provenance) -> (Vec<(usize, f64)>, CostLedger) {
    let n = g.n();
    let m = g.m();
    let r = cfg.packing_count(n, eps_round);
    let k = cfg.levels.unwrap_or_else(|| default_levels(n));
    let bits = SieveBits::new(rounds, m, seed, cfg);
    let round_bits = bits.rounds();
    let mut membership: Vec<Vec<u32>> = vec![Vec::new(); m];
    let mut ledger = CostLedger::default();

    for i in 1..=rounds {
        let view = ReweightedView::new(g, |e, w| implicit_weight(e, i - 1, &membership[e], &round_bits, w));
        // Each nonempty spanner takes at least one edge, so a packing of
        // r >= (positive edges) spanners absorbs the whole residual.
        let positive: Vec<usize> =
            (0..m).into_par_iter().filter(|&e| implicit_weight(e, i - 1, &membership[e], &round_bits, g.edge(e).w) > 0.0).collect();
        ledger.add_classical(m as u64);
        let union = if r >= positive.len() {
            positive
        } else {
            let packing = spanner_packing(&view, r, k, derive_seed(seed, &[STREAM_SIEVE, 0, i as u64]));
            ledger.combine(&packing.ledger);
            packing.union()
        };
        prov.packing_sizes.push(union.len());
        for e in union {
            membership[e].push(i as u32);
        }
    }

    let edges: Vec<(usize, f64)> = (0..m)
        .into_par_iter()
        .filter_map(|e| {
            let w = implicit_weight(e, rounds, &membership[e], &round_bits, g.edge(e).w);
            (w > 0.0).then_some((e, w))
        })
        .collect();
    ledger.add_classical(m as u64);
    ledger.add_quantum(grover_cost(m, edges.len()));
    (edges, ledger)
}

/// One round: an `r`-packing with `r = ceil(c_pack log^2(n) / eps^2)` kept
/// at original weight, every other edge kept with probability 1/4 at four
/// times its weight.
pub fn half_sparsify(g: &WeightedGraph, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<Sparsifier, SparsifyError> {
    check_eps(eps)?;
    let mut prov = provenance(Method::Half, seed, eps, cfg);
    prov.rounds = 1;
    let (edges, ledger) = sieve(g, eps, 1, seed, cfg, &mut prov);
    Ok(Sparsifier { n: g.n(), edges, provenance: prov, ledger, warnings: Vec::new() })
}

/// `T = ceil(log2(m/n))` rounds of half-sparsification at `eps / (2T)`,
/// run on implicit weights, with a single extraction of the survivors.
pub fn ks_sparsify(g: &WeightedGraph, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<Sparsifier, SparsifyError> {
    let s = ks_unlogged(g, eps, seed, cfg)?;
    for w in &s.warnings {
        log::warn!("{w}");
    }
    Ok(s)
}

fn ks_unlogged(g: &WeightedGraph, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<Sparsifier, SparsifyError> {
    check_eps(eps)?;
    let (n, m) = (g.n(), g.m());
    let mut prov = provenance(Method::Ks, seed, eps, cfg);
    let mut warnings = Vec::new();
    if m > 0 && eps * eps < n as f64 / m as f64 {
        warnings.push(format!("epsilon {eps} is below sqrt(n/m) = {:.4}; expect little size reduction", (n as f64 / m as f64).sqrt()));
    }
    if m <= n {
        let mut s = Sparsifier::identity(g, prov);
        s.warnings = warnings;
        s.ledger.add_classical(m as u64);
        return Ok(s);
    }
    let rounds = (m as f64 / n as f64).log2().ceil() as usize;
    prov.rounds = rounds;
    let (edges, ledger) = sieve(g, eps / (2.0 * rounds as f64), rounds, seed, cfg, &mut prov);
    Ok(Sparsifier { n, edges, provenance: prov, ledger, warnings })
}

/// Sampling probabilities `min(1, C w_e R_e log(n) / eps^2)`.
pub fn sampling_probabilities(g: &WeightedGraph, estimates: &[f64], eps: f64, cfg: &SparsifyConfig) -> Result<Vec<f64>, SparsifyError> {
    if estimates.len() != g.m() {
        return Err(SparsifyError::EstimateCount { expected: g.m(), got: estimates.len() });
    }
    let factor = cfg.sample_c * cfg.log(g.n()) / (eps * eps);
    g.edges()
        .iter()
        .zip(estimates)
        .enumerate()
        .map(|(i, (e, &r))| {
            if !(r.is_finite() && r > 0.0) {
                Err(SparsifyError::BadEstimate { edge: i, value: r })
            } else {
                Ok((factor * e.w * r).min(1.0))
            }
        })
        .collect()
}

/// Keeps every edge independently with probability `p_e`, at weight
/// `w_e / p_e`.
pub fn resistance_sample(
    g: &WeightedGraph,
    estimates: &[f64],
    eps: f64,
    seed: u64,
    cfg: &SparsifyConfig,
) -> Result<Sparsifier, SparsifyError> {
    check_eps(eps)?;
    let p = sampling_probabilities(g, estimates, eps, cfg)?;
    let mut rng = rng_from(seed, &[STREAM_SAMPLE]);
    let mut edges = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        let u: f64 = rng.random();
        if p[i] > 0.0 && u < p[i] {
            edges.push((i, e.w / p[i]));
        }
    }
    let mut ledger = CostLedger::default();
    ledger.add_classical(g.m() as u64);
    let expected: f64 = p.iter().sum();
    ledger.add_quantum((g.m() as f64 * expected.max(1.0)).sqrt());
    Ok(Sparsifier { n: g.n(), edges, provenance: provenance(Method::Sample, seed, eps, cfg), ledger, warnings: Vec::new() })
}

/// Everything the refined pipeline computed.
#[derive(Debug, Clone)]
pub struct RefinedRun {
    pub output: Sparsifier,
    /// Stage 1 output.
    pub rough: Sparsifier,
    /// Stage 1 was not sparser than `G`, so `G` itself fed stage 2.
    pub rough_fallback: bool,
    /// Stage 2 resistance estimates for every edge of `G`.
    pub estimates: Vec<f64>,
    /// Stage 2 oracle, available when `G` is connected.
    pub oracle: Option<ResistanceOracle>,
}

/// Refined sparsifier: see [`refined_run`].
pub fn refined_sparsify(g: &WeightedGraph, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<Sparsifier, SparsifyError> {
    Ok(refined_run(g, eps, seed, cfg)?.output)
}

/// Stage 1 builds `ks_sparsify(G, eps_rough)`, falling back to `G` when it
/// is not sparser. Stage 2 builds a resistance oracle at `eps_oracle` on that
/// graph. Stage 3 samples the original `G` with the oracle's estimates.
/// Disconnected inputs are processed per component.
pub fn refined_run(g: &WeightedGraph, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<RefinedRun, SparsifyError> {
    check_eps(eps)?;
    let comps = g.components();
    if comps.count <= 1 {
        return refined_connected(g, eps, seed, cfg);
    }
    let mut parts = Vec::new();
    for (c, (sub, edge_map)) in split_components(g, &comps.label, comps.count).into_iter().enumerate() {
        if sub.m() == 0 {
            continue;
        }
        let run = refined_connected(&sub, eps, derive_seed(seed, &[STREAM_COMPONENT, c as u64]), cfg)?;
        parts.push((run, edge_map));
    }
    let mut output = Sparsifier::identity(&WeightedGraph::build(g.n(), &[])?, provenance(Method::Refined, seed, eps, cfg));
    let mut rough = Sparsifier::identity(&WeightedGraph::build(g.n(), &[])?, provenance(Method::Ks, seed, cfg.eps_rough, cfg));
    let mut estimates = vec![1.0; g.m()];
    let mut rough_fallback = false;
    for (run, edge_map) in parts {
        output.edges.extend(run.output.edges.iter().map(|&(e, w)| (edge_map[e], w)));
        rough.edges.extend(run.rough.edges.iter().map(|&(e, w)| (edge_map[e], w)));
        for (local, &r) in run.estimates.iter().enumerate() {
            estimates[edge_map[local]] = r;
        }
        output.ledger.combine(&run.output.ledger);
        rough.ledger.combine(&run.rough.ledger);
        output.warnings.extend(run.output.warnings);
        rough_fallback |= run.rough_fallback;
        merge_packing_sizes(&mut output.provenance, &run.output.provenance);
        merge_packing_sizes(&mut rough.provenance, &run.rough.provenance);
    }
    output.edges.sort_unstable_by_key(|&(e, _)| e);
    rough.edges.sort_unstable_by_key(|&(e, _)| e);
    output.provenance.rough_fallback = Some(rough_fallback);
    Ok(RefinedRun { output, rough, rough_fallback, estimates, oracle: None })
}

fn merge_packing_sizes(into: &mut Provenance, from: &Provenance) {
    into.rounds = into.rounds.max(from.rounds);
    for (i, &s) in from.packing_sizes.iter().enumerate() {
        if i < into.packing_sizes.len() {
            into.packing_sizes[i] += s;
        } else {
            into.packing_sizes.push(s);
        }
    }
}

/// Induced subgraph per component, with local-to-global edge ids.
pub(crate) fn split_components(g: &WeightedGraph, label: &[usize], count: usize) -> Vec<(WeightedGraph, Vec<usize>)> {
    let mut local = vec![0usize; g.n()];
    let mut sizes = vec![0usize; count];
    for v in 0..g.n() {
        local[v] = sizes[label[v]];
        sizes[label[v]] += 1;
    }
    let mut raw: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); count];
    let mut maps: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (i, e) in g.edges().iter().enumerate() {
        let c = label[e.u];
        if label[e.v] == c {
            raw[c].push((local[e.u], local[e.v], e.w));
            maps[c].push(i);
        }
    }
    // edges arrive sorted by global (u, v); local ids preserve node order,
    // so each component's edges are already in canonical order
    raw.into_iter()
        .zip(maps)
        .zip(sizes)
        .map(|((r, map), size)| (WeightedGraph::build(size, &r).expect("induced subgraph is valid"), map))
        .collect()
}

fn refined_connected(g: &WeightedGraph, eps: f64, seed: u64, cfg: &SparsifyConfig) -> Result<RefinedRun, SparsifyError> {
    let (n, m) = (g.n(), g.m());
    let mut prov = provenance(Method::Refined, seed, eps, cfg);
    let mut warnings = Vec::new();
    let mut ledger = CostLedger::default();

    // the rough stage runs far below sqrt(n/m) by design, so its size
    // warning is dropped
    let rough = ks_unlogged(g, cfg.eps_rough, derive_seed(seed, &[STREAM_REFINED, 1]), cfg)?;
    ledger.combine(&rough.ledger);
    prov.rounds = rough.provenance.rounds;
    prov.packing_sizes = rough.provenance.packing_sizes.clone();
    let positive = g.edges().iter().filter(|e| e.w > 0.0).count();
    let rough_fallback = rough.len() >= positive;
    prov.rough_fallback = Some(rough_fallback);
    let h1 = if rough_fallback { g.reweighted_subgraph(&Sparsifier::identity(g, prov.clone()).edges) } else { rough.to_graph(g) };

    let oracle = if n <= 1 || h1.m() == 0 {
        None
    } else {
        let q = sketch_rows(n, cfg.eps_oracle, cfg.log_base);
        if q >= h1.m() && n <= DENSE_LIMIT {
            Some(ResistanceOracle::exact(&h1)?)
        } else {
            let rows = q.min(cfg.max_sketch_rows);
            if rows < q {
                let msg = format!("resistance sketch capped at {rows} of {q} rows");
                log::warn!("{msg}");
                warnings.push(msg);
            }
            Some(ResistanceOracle::sketch(&h1, cfg.eps_oracle, rows, derive_seed(seed, &[STREAM_REFINED, 2]), cfg.solver_tol)?)
        }
    };
    let estimates: Vec<f64> = match &oracle {
        Some(o) => g
            .edges()
            .iter()
            .map(|e| {
                let r = o.query(e.u, e.v);
                if e.w > 0.0 && r > 0.0 {
                    r
                } else {
                    1.0
                }
            })
            .collect(),
        None => vec![1.0; m],
    };

    let mut sample = resistance_sample(g, &estimates, eps, derive_seed(seed, &[STREAM_REFINED, 3]), cfg)?;
    ledger.combine(&sample.ledger);
    sample.provenance = prov;
    sample.ledger = ledger;
    sample.warnings = warnings;
    Ok(RefinedRun { output: sample, rough, rough_fallback, estimates, oracle })
}

/// Extreme eigenvalues of the pencil `(L_H, L_G)` on the image of `L_G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub epsilon: f64,
    pub pass: bool,
}

/// Relative slack on the `[1 - eps, 1 + eps]` window for rounding error.
const SPECTRAL_SLACK: f64 = 1e-9;

pub fn verify_spectral(g: &WeightedGraph, h: &WeightedGraph, eps: f64) -> Result<SpectralReport, SparsifyError> {
    if g.n() != h.n() {
        return Err(SparsifyError::NodeCountMismatch { g: g.n(), h: h.n() });
    }
    let (cg, ch) = (g.components(), h.components());
    if cg != ch {
        return Err(SparsifyError::ComponentMismatch);
    }
    let lg = g.dense_laplacian()?;
    let lh = h.dense_laplacian()?;
    let (lambda_min, lambda_max) = dense::pencil_extremes(lg, &lh, cg.count);
    let pass = lambda_min >= 1.0 - eps - SPECTRAL_SLACK && lambda_max <= 1.0 + eps + SPECTRAL_SLACK;
    Ok(SpectralReport { lambda_min, lambda_max, epsilon: eps, pass })
}

/// Fraction of cuts with `|val_H(S) - val_G(S)| <= eps val_G(S)`, over
/// `trials` uniformly random nonempty proper subsets plus all singletons.
pub fn verify_cuts(g: &WeightedGraph, h: &WeightedGraph, eps: f64, trials: usize, seed: u64) -> f64 {
    let n = g.n();
    if n < 2 {
        return 1.0;
    }
    let within = |member: &[bool]| {
        let (mut vg, mut vh) = (0.0, 0.0);
        for e in g.edges() {
            if member[e.u] != member[e.v] {
                vg += e.w;
            }
        }
        for e in h.edges() {
            if member[e.u] != member[e.v] {
                vh += e.w;
            }
        }
        (vh - vg).abs() <= eps * vg + SPECTRAL_SLACK * vg.max(f64::MIN_POSITIVE)
    };
    let mut rng = rng_from(seed, &[0xC7]);
    let mut passed = 0usize;
    let mut member = vec![false; n];
    for _ in 0..trials {
        loop {
            member.iter_mut().for_each(|b| *b = rng.random());
            let size = member.iter().filter(|&&b| b).count();
            if size > 0 && size < n {
                break;
            }
        }
        passed += within(&member) as usize;
    }
    for v in 0..n {
        member.iter_mut().for_each(|b| *b = false);
        member[v] = true;
        passed += within(&member) as usize;
    }
    passed as f64 / (trials + n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn small_cfg(c_pack: f64) -> SparsifyConfig {
        SparsifyConfig { c_pack, ..SparsifyConfig::default() }
    }

    #[test]
    fn rejects_bad_epsilon() {
        let g = gen::cycle(5, 1.0);
        let cfg = SparsifyConfig::default();
        assert!(matches!(half_sparsify(&g, 0.0, 1, &cfg), Err(SparsifyError::BadEpsilon(_))));
        assert!(matches!(ks_sparsify(&g, 1.5, 1, &cfg), Err(SparsifyError::BadEpsilon(_))));
    }

    #[test]
    fn ks_with_few_edges_is_identity() {
        let g = gen::cycle(12, 2.0);
        let s = ks_sparsify(&g, 0.5, 3, &SparsifyConfig::default()).unwrap();
        assert_eq!(s.provenance.rounds, 0);
        assert_eq!(s.to_graph(&g), g);
    }

    #[test]
    fn exhausted_packing_returns_input() {
        let g = gen::complete(16, 1.0);
        let s = half_sparsify(&g, 0.5, 3, &SparsifyConfig::default()).unwrap();
        assert_eq!(s.to_graph(&g), g);
    }

    #[test]
    fn ks_weights_are_powers_of_four() {
        let g = gen::erdos_renyi(60, 0.6, 1.0, 2.0, 4);
        let s = ks_sparsify(&g, 1.0, 5, &small_cfg(0.0002)).unwrap();
        assert!(s.provenance.rounds >= 1);
        assert!(s.len() < g.m());
        for &(e, w) in &s.edges {
            let ratio = w / g.edge(e).w;
            let j = ratio.log(4.0).round();
            assert!(j >= 0.0 && (ratio - 4f64.powf(j)).abs() < 1e-9, "ratio {ratio}");
        }
    }

    #[test]
    fn same_seed_same_output() {
        let g = gen::erdos_renyi(50, 0.5, 1.0, 2.0, 2);
        let cfg = small_cfg(0.002);
        assert_eq!(ks_sparsify(&g, 1.0, 8, &cfg).unwrap(), ks_sparsify(&g, 1.0, 8, &cfg).unwrap());
        let cfg = SparsifyConfig { sample_c: 0.05, ..SparsifyConfig::default() };
        assert_eq!(refined_sparsify(&g, 0.5, 8, &cfg).unwrap(), refined_sparsify(&g, 0.5, 8, &cfg).unwrap());
    }

    #[test]
    fn sampling_caps_at_one() {
        let g = gen::random_connected(30, 29, 1.0, 3.0, 1);
        let est: Vec<f64> = g.edges().iter().map(|e| 1.0 / e.w).collect();
        let s = resistance_sample(&g, &est, 0.5, 1, &SparsifyConfig::default()).unwrap();
        assert_eq!(s.to_graph(&g), g);
        let mut bad = est.clone();
        bad[3] = 0.0;
        assert!(matches!(
            resistance_sample(&g, &bad, 0.5, 1, &SparsifyConfig::default()),
            Err(SparsifyError::BadEstimate { edge: 3, .. })
        ));
    }

    #[test]
    fn verify_identity_and_scaling() {
        let g = gen::erdos_renyi(30, 0.3, 1.0, 2.0, 6);
        let r = verify_spectral(&g, &g, 0.1).unwrap();
        assert!(r.pass && (r.lambda_min - 1.0).abs() < 1e-9 && (r.lambda_max - 1.0).abs() < 1e-9);
        let scaled: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.w * 1.25)).collect();
        let h = WeightedGraph::build(30, &scaled).unwrap();
        let r = verify_spectral(&g, &h, 0.25).unwrap();
        assert!(r.pass);
        assert!((r.lambda_min - 1.25).abs() < 1e-9);
        assert_eq!(verify_cuts(&g, &g, 0.0, 20, 1), 1.0);
    }

    #[test]
    fn missing_bridge() {
        let g = gen::bridged_cliques(5, 1.0);
        let bridge = g.find_edge(4, 5).unwrap();
        let kept: Vec<_> = (0..g.m()).filter(|&e| e != bridge).map(|e| (e, g.edge(e).w)).collect();
        let h = g.reweighted_subgraph(&kept);
        assert!(matches!(verify_spectral(&g, &h, 0.5), Err(SparsifyError::ComponentMismatch)));
        assert!(verify_cuts(&g, &h, 0.1, 10, 2) < 1.0);
    }

    #[test]
    fn refined_handles_components() {
        let mut raw: Vec<_> = gen::complete(6, 1.0).edges().iter().map(|e| (e.u, e.v, e.w)).collect();
        raw.extend(gen::complete(5, 2.0).edges().iter().map(|e| (e.u + 7, e.v + 7, e.w)));
        let g = WeightedGraph::build(12, &raw).unwrap();
        let s = refined_sparsify(&g, 0.5, 1, &SparsifyConfig::default()).unwrap();
        let h = s.to_graph(&g);
        assert!(verify_spectral(&g, &h, 0.5).unwrap().pass);
    }
}
