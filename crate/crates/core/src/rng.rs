//! Deterministic random streams.
//!
//! Reproducibility contract: every stochastic component draws from an
//! [`RngStream`], a ChaCha8 stream cipher (`rand_chacha`) seeded from a
//! single `u64` through the SplitMix64 expansion of `seed_from_u64`. The
//! same seed therefore replays the same draw sequence on every platform.
//!
//! Independent streams (one per benchmark run, one per shift vector, ...)
//! are derived with [`mix_seed`], which folds a list of role/index tags into
//! the master seed with SplitMix64 finalizers. Derived seeds depend only on
//! the tags, never on execution order, so campaigns can run their tasks in
//! any order (or in parallel) without changing any individual result.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer step (Steele, Lea, Flood 2014).
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a substream seed from a master seed and a list of tags.
///
/// Order-sensitive in the tags (so `[a, b]` and `[b, a]` differ) and
/// avalanching in every input bit.
pub fn mix_seed(master: u64, tags: &[u64]) -> u64 {
    let mut acc = splitmix64(master ^ 0xA076_1D64_78BD_642F);
    for &t in tags {
        acc = splitmix64(acc.wrapping_add(splitmix64(t)));
    }
    acc
}

/// FNV-1a hash of a byte string, for folding names into seed tags.
pub fn hash_tag(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// A seeded, deterministic random stream. Remembers its seed for reporting.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for a derived role, e.g. one benchmark run inside a campaign.
    pub fn derived(master: u64, tags: &[u64]) -> Self {
        Self::new(mix_seed(master, tags))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}
