//! Query-counted graph access and the randomness behind implicit weights.
//!
//! Quantum subroutines are never executed. Algorithms run classically and
//! charge a modeled query cost (`sqrt(N * s)` for finding `s` marked items
//! among `N`) next to the classical query count. Polylogarithmic factors of
//! the model are dropped.

use std::cell::Cell;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AdjacencyAccess, Neighbor};
use crate::rng::{rng_from, splitmix64};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("node {v} out of range for {n} nodes")]
    NodeOutOfRange { v: usize, n: usize },
    #[error("neighbor index {k} out of range for node {v} of degree {degree}")]
    IndexOutOfRange { v: usize, k: usize, degree: usize },
}

/// Modeled cost of finding all marked items: `sqrt(n_items * max(n_marked, 1))`.
pub fn grover_cost(n_items: usize, n_marked: usize) -> f64 {
    debug_assert!(n_marked <= n_items || n_items == 0);
    (n_items as f64 * n_marked.max(1) as f64).sqrt()
}

/// Classical query count and modeled quantum cost of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    pub classical_queries: u64,
    pub modeled_quantum_queries: f64,
}

impl CostLedger {
    pub fn combine(&mut self, other: &CostLedger) {
        self.classical_queries += other.classical_queries;
        self.modeled_quantum_queries += other.modeled_quantum_queries;
    }

    pub fn combined(mut self, other: &CostLedger) -> CostLedger {
        self.combine(other);
        self
    }

    pub fn add_classical(&mut self, queries: u64) {
        self.classical_queries += queries;
    }

    pub fn add_quantum(&mut self, cost: f64) {
        debug_assert!(cost >= 0.0);
        self.modeled_quantum_queries += cost;
    }
}

/// Adjacency access that counts every query.
///
/// Counters use interior mutability so read-only algorithms can share the
/// oracle by reference. One oracle belongs to one run; parallel work uses
/// separate oracles and merges their ledgers.
pub struct QueryOracle<A> {
    inner: A,
    degree_queries: Cell<u64>,
    neighbor_queries: Cell<u64>,
    weight_queries: Cell<u64>,
    quantum: Cell<f64>,
}

impl<A: AdjacencyAccess> QueryOracle<A> {
    pub fn new(inner: A) -> Self {
        QueryOracle {
            inner,
            degree_queries: Cell::new(0),
            neighbor_queries: Cell::new(0),
            weight_queries: Cell::new(0),
            quantum: Cell::new(0.0),
        }
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }

    pub fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn check_node(&self, v: usize) -> Result<(), OracleError> {
        let n = self.inner.node_count();
        if v >= n {
            Err(OracleError::NodeOutOfRange { v, n })
        } else {
            Ok(())
        }
    }

    pub fn degree(&self, v: usize) -> Result<usize, OracleError> {
        self.check_node(v)?;
        bump(&self.degree_queries);
        Ok(self.inner.degree(v))
    }

    /// The `k`-th neighbor of `v` with the connecting edge weight.
    pub fn neighbor(&self, v: usize, k: usize) -> Result<Neighbor, OracleError> {
        self.check_node(v)?;
        let degree = self.inner.degree(v);
        if k >= degree {
            return Err(OracleError::IndexOutOfRange { v, k, degree });
        }
        bump(&self.neighbor_queries);
        Ok(self.inner.neighbor(v, k))
    }

    /// Weight of the `k`-th incident edge of `v`.
    pub fn weight(&self, v: usize, k: usize) -> Result<f64, OracleError> {
        self.check_node(v)?;
        let degree = self.inner.degree(v);
        if k >= degree {
            return Err(OracleError::IndexOutOfRange { v, k, degree });
        }
        bump(&self.weight_queries);
        Ok(self.inner.neighbor(v, k).weight)
    }

    /// Full adjacency list of `v`: one degree query plus one neighbor query
    /// per entry. Callers guarantee `v` is in range.
    pub(crate) fn scan(&self, v: usize) -> impl Iterator<Item = Neighbor> + '_ {
        bump(&self.degree_queries);
        let d = self.inner.degree(v);
        self.neighbor_queries.set(self.neighbor_queries.get() + d as u64);
        (0..d).map(move |k| self.inner.neighbor(v, k))
    }

    pub fn charge_quantum(&self, cost: f64) {
        self.quantum.set(self.quantum.get() + cost);
    }

    pub fn degree_queries(&self) -> u64 {
        self.degree_queries.get()
    }

    pub fn neighbor_queries(&self) -> u64 {
        self.neighbor_queries.get()
    }

    pub fn weight_queries(&self) -> u64 {
        self.weight_queries.get()
    }

    pub fn total_queries(&self) -> u64 {
        self.degree_queries() + self.neighbor_queries() + self.weight_queries()
    }

    pub fn ledger(&self) -> CostLedger {
        CostLedger { classical_queries: self.total_queries(), modeled_quantum_queries: self.quantum.get() }
    }
}

#[inline]
fn bump(c: &Cell<u64>) {
    c.set(c.get() + 1);
}

/// A finite field used for polynomial hashing.
pub trait Field: Copy + Eq {
    const ORDER: u32;
    fn zero() -> Self;
    fn from_u32(x: u32) -> Self;
    fn to_u32(self) -> u32;
    fn add(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
}

/// GF(2^16) modulo `x^16 + x^12 + x^3 + x + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf16(pub u16);

const GF16_POLY: u32 = 0x1_100B;

struct Gf16Tables {
    log: Vec<u16>,
    exp: Vec<u16>,
}

fn gf16_tables() -> &'static Gf16Tables {
    static TABLES: std::sync::OnceLock<Gf16Tables> = std::sync::OnceLock::new();
    TABLES.get_or_init(|| {
        // x is a generator for this modulus; exp has two periods so that
        // log a + log b needs no reduction
        let mut exp = vec![0u16; 2 * 65535];
        let mut log = vec![0u16; 65536];
        let mut x: u32 = 1;
        for i in 0..65535 {
            exp[i] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & 0x1_0000 != 0 {
                x ^= GF16_POLY;
            }
        }
        assert_eq!(x, 1, "modulus must be primitive");
        for i in 65535..2 * 65535 {
            exp[i] = exp[i - 65535];
        }
        Gf16Tables { log, exp }
    })
}

impl Field for Gf16 {
    const ORDER: u32 = 1 << 16;
    fn zero() -> Self {
        Gf16(0)
    }
    fn from_u32(x: u32) -> Self {
        Gf16(x as u16)
    }
    fn to_u32(self) -> u32 {
        self.0 as u32
    }
    #[inline]
    fn add(self, other: Self) -> Self {
        Gf16(self.0 ^ other.0)
    }
    #[inline]
    fn mul(self, other: Self) -> Self {
        if self.0 == 0 || other.0 == 0 {
            return Gf16(0);
        }
        let t = gf16_tables();
        Gf16(t.exp[t.log[self.0 as usize] as usize + t.log[other.0 as usize] as usize])
    }
}

/// Integers modulo 7, a reduced field for exhaustive tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Z7(pub u8);

impl Field for Z7 {
    const ORDER: u32 = 7;
    fn zero() -> Self {
        Z7(0)
    }
    fn from_u32(x: u32) -> Self {
        Z7((x % 7) as u8)
    }
    fn to_u32(self) -> u32 {
        self.0 as u32
    }
    fn add(self, other: Self) -> Self {
        Z7((self.0 + other.0) % 7)
    }
    fn mul(self, other: Self) -> Self {
        Z7((self.0 * other.0) % 7)
    }
}

/// GF(2^4) modulo `x^4 + x + 1`, a reduced binary field for exhaustive tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf4(pub u8);

impl Field for Gf4 {
    const ORDER: u32 = 16;
    fn zero() -> Self {
        Gf4(0)
    }
    fn from_u32(x: u32) -> Self {
        Gf4((x & 0xF) as u8)
    }
    fn to_u32(self) -> u32 {
        self.0 as u32
    }
    fn add(self, other: Self) -> Self {
        Gf4(self.0 ^ other.0)
    }
    fn mul(self, other: Self) -> Self {
        let (mut a, mut b, mut r) = (self.0, other.0, 0u8);
        while b != 0 {
            if b & 1 != 0 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & 0x10 != 0 {
                a ^= 0x13;
            }
        }
        Gf4(r)
    }
}

/// Polynomial `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` over `F`. With uniform
/// coefficients its values at any `k` distinct points are independent and
/// uniform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyHash<F> {
    coeffs: Vec<F>,
}

impl<F: Field> PolyHash<F> {
    pub fn from_coeffs(coeffs: Vec<F>) -> Self {
        assert!(!coeffs.is_empty());
        PolyHash { coeffs }
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn eval(&self, x: F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, &c| acc.mul(x).add(c))
    }
}

/// A source of bits `r(index)`, each 1 with probability 1/4.
pub trait RandomBits: Sync {
    fn bit(&self, index: u64) -> bool;
}

/// k-wise independent bits from a polynomial over GF(2^16). A bit is 1 iff
/// the hash value is below the threshold, `2^14` by default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KWiseBits {
    seed: u64,
    hash: PolyHash<Gf16>,
    threshold: u32,
}

pub const KWISE_THRESHOLD: u32 = 1 << 14;

impl KWiseBits {
    pub fn new(k: usize, seed: u64) -> Self {
        Self::with_threshold(k, seed, KWISE_THRESHOLD)
    }

    pub fn with_threshold(k: usize, seed: u64, threshold: u32) -> Self {
        assert!(k >= 1, "independence parameter must be positive");
        assert!(threshold <= Gf16::ORDER);
        let mut rng = rng_from(seed, &[0x4B]);
        let coeffs = (0..k).map(|_| Gf16(rng.random::<u16>())).collect();
        KWiseBits { seed, hash: PolyHash::from_coeffs(coeffs), threshold }
    }

    pub fn k(&self) -> usize {
        self.hash.k()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    /// Field point of an index. Injective on `0..2^16`; larger indices fold
    /// their high bits in, so distinct indices may collide.
    pub fn point(index: u64) -> Gf16 {
        let high = if index >> 16 == 0 { 0 } else { splitmix64(index >> 16) as u16 };
        Gf16(mix16((index as u16) ^ high))
    }

    pub fn value(&self, index: u64) -> u32 {
        self.hash.eval(Self::point(index)).to_u32()
    }
}

impl RandomBits for KWiseBits {
    #[inline]
    fn bit(&self, index: u64) -> bool {
        self.value(index) < self.threshold
    }
}

/// Bijective mixer on 16-bit values (odd multiply, xorshift rounds).
#[inline]
fn mix16(mut x: u16) -> u16 {
    x ^= x >> 7;
    x = x.wrapping_mul(0x2F6B);
    x ^= x >> 9;
    x = x.wrapping_mul(0x8A35);
    x ^ (x >> 8)
}

/// Hash-based stand-in for a uniformly random string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FullyRandom {
    pub seed: u64,
}

impl RandomBits for FullyRandom {
    #[inline]
    fn bit(&self, index: u64) -> bool {
        splitmix64(splitmix64(self.seed) ^ index) >> 62 == 0
    }
}

/// Weight of edge `e` after `i` sieving rounds.
///
/// `membership` lists the rounds (1-based, ascending) whose packing contains
/// `e`. With `k` memberships up to round `i` and `j` the last of them (0 if
/// none), the weight is `4^(i-k) * base_w` when `r_l(e) = 1` for every
/// round `l` in `(j, i]`, and 0 otherwise. `bits[l - 1]` is `r_l`.
pub fn implicit_weight<B: RandomBits>(e: usize, i: usize, membership: &[u32], bits: &[B], base_w: f64) -> f64 {
    let mut k = 0;
    let mut j = 0;
    for &round in membership {
        let round = round as usize;
        if round > i {
            break;
        }
        k += 1;
        j = round;
    }
    for l in j + 1..=i {
        if !bits[l - 1].bit(e as u64) {
            return 0.0;
        }
    }
    base_w * 4f64.powi((i - k) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn path_queries() {
        let g = gen::path(3, 1.0);
        let o = QueryOracle::new(&g);
        assert_eq!(o.degree(1).unwrap(), 2);
        let nb = o.neighbor(0, 0).unwrap();
        assert_eq!((nb.node, nb.weight), (1, 1.0));
        assert_eq!(o.neighbor(0, 1), Err(OracleError::IndexOutOfRange { v: 0, k: 1, degree: 1 }));
        assert_eq!(o.degree(3), Err(OracleError::NodeOutOfRange { v: 3, n: 3 }));
        // failed queries are not counted
        assert_eq!(o.total_queries(), 2);
    }

    #[test]
    fn counters_sum_to_query_count() {
        let g = gen::erdos_renyi(20, 0.3, 1.0, 1.0, 1);
        let o = QueryOracle::new(&g);
        let mut issued = 0;
        let mut v = 0;
        while issued < 100 {
            let d = o.degree(v).unwrap();
            issued += 1;
            if d > 0 && issued < 100 {
                o.neighbor(v, issued % d).unwrap();
                issued += 1;
            }
            if d > 0 && issued < 100 {
                o.weight(v, 0).unwrap();
                issued += 1;
            }
            v = (v + 7) % 20;
        }
        assert_eq!(o.total_queries(), 100);
        assert_eq!(o.ledger().classical_queries, 100);
    }

    #[test]
    fn grover_cost_examples() {
        assert_eq!(grover_cost(100, 0), 10.0);
        assert_eq!(grover_cost(100, 25), 50.0);
        let c = grover_cost(10_000, 100);
        assert_eq!(c, 1000.0);
        assert!(c < 10_000.0);
    }

    #[test]
    fn ledger_combine_is_associative() {
        let a = CostLedger { classical_queries: 3, modeled_quantum_queries: 0.5 };
        let b = CostLedger { classical_queries: 4, modeled_quantum_queries: 0.25 };
        let c = CostLedger { classical_queries: 5, modeled_quantum_queries: 2.0 };
        assert_eq!(a.combined(&b).combined(&c), a.combined(&b.combined(&c)));
    }

    #[test]
    fn gf16_is_a_field() {
        let t = gf16_tables();
        assert_eq!(t.exp[0], 1);
        for a in [1u16, 2, 3, 0x1234, 0xFFFF, 0x8000] {
            let a = Gf16(a);
            let inv = Gf16(t.exp[(65535 - t.log[a.0 as usize] as usize) % 65535]);
            assert_eq!(a.mul(inv), Gf16(1));
            assert_eq!(a.mul(Gf16(1)), a);
            assert_eq!(a.add(a), Gf16(0));
        }
        // carry-less reference multiplication
        fn slow(a: u16, b: u16) -> u16 {
            let (mut a, mut b, mut r) = (a as u32, b as u32, 0u32);
            while b != 0 {
                if b & 1 != 0 {
                    r ^= a;
                }
                b >>= 1;
                a <<= 1;
                if a & 0x1_0000 != 0 {
                    a ^= GF16_POLY;
                }
            }
            r as u16
        }
        let mut x = 12345u64;
        for _ in 0..2000 {
            x = splitmix64(x);
            let (a, b) = (x as u16, (x >> 16) as u16);
            assert_eq!(Gf16(a).mul(Gf16(b)).0, slow(a, b));
        }
    }

    #[test]
    fn point_map_is_injective_on_16_bits() {
        let mut seen = vec![false; 1 << 16];
        for i in 0..1u64 << 16 {
            let p = KWiseBits::point(i).0 as usize;
            assert!(!seen[p]);
            seen[p] = true;
        }
    }

    #[test]
    fn kwise_bits_deterministic() {
        let a = KWiseBits::new(8, 42);
        let b = KWiseBits::new(8, 42);
        for i in 0..1000 {
            assert_eq!(a.bit(i), b.bit(i));
        }
    }

    #[test]
    fn kwise_frequency_is_one_quarter() {
        let r = KWiseBits::new(16, 7);
        let ones = (0..100_000u64).filter(|&i| r.bit(i)).count();
        let freq = ones as f64 / 100_000.0;
        assert!((freq - 0.25).abs() <= 0.01, "frequency {freq}");

        let f = FullyRandom { seed: 7 };
        let ones = (0..100_000u64).filter(|&i| f.bit(i)).count();
        assert!((ones as f64 / 100_000.0 - 0.25).abs() <= 0.01);
    }

    #[test]
    fn implicit_weight_rules() {
        struct Ones;
        impl RandomBits for Ones {
            fn bit(&self, _: u64) -> bool {
                true
            }
        }
        struct Zeros;
        impl RandomBits for Zeros {
            fn bit(&self, _: u64) -> bool {
                false
            }
        }
        let ones = [Ones, Ones, Ones];
        assert_eq!(implicit_weight(0, 0, &[], &ones, 2.5), 2.5);
        assert_eq!(implicit_weight(0, 3, &[1, 2, 3], &ones, 2.5), 2.5);
        assert_eq!(implicit_weight(0, 3, &[], &ones, 1.0), 64.0);
        assert_eq!(implicit_weight(0, 3, &[2], &ones, 1.0), 16.0);
        let zeros = [Zeros, Zeros, Zeros];
        assert_eq!(implicit_weight(0, 3, &[], &zeros, 1.0), 0.0);
        // bits before the last membership are not consulted
        assert_eq!(implicit_weight(0, 2, &[2], &zeros, 1.0), 4.0);
        assert_eq!(implicit_weight(0, 3, &[2, 3], &zeros, 1.0), 4.0);
    }
}
