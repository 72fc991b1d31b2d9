//! Seed plumbing. Every randomized routine takes a `u64` seed and derives
//! independent sub-streams from it, so runs are reproducible and parallel
//! work can be split without sharing a generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a path of stream labels.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &label| splitmix64(acc ^ splitmix64(label.wrapping_add(0x632B_E59B_D9B4_E019))))
}

pub fn rng_from(seed: u64, path: &[u64]) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, path))
}

// stream labels, kept distinct so stages never share randomness
pub(crate) const STREAM_SPANNER: u64 = 1;
pub(crate) const STREAM_PACKING: u64 = 2;
pub(crate) const STREAM_SIEVE: u64 = 3;
pub(crate) const STREAM_SAMPLE: u64 = 4;
pub(crate) const STREAM_SKETCH: u64 = 5;
pub(crate) const STREAM_REFINED: u64 = 6;
pub(crate) const STREAM_EIGS: u64 = 7;
pub(crate) const STREAM_COMPONENT: u64 = 8;
pub(crate) const STREAM_HARD: u64 = 9;
