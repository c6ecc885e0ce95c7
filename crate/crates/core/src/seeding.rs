//! Deterministic seed derivation.
//!
//! Every random quantity in a run is drawn from a ChaCha stream keyed by
//! the run seed and a small tuple of indices (drop, UE, site, ...). Draws
//! are therefore a pure function of their key, which makes results
//! independent of evaluation order and of the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// splitmix64 finalizer
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a key path.
pub fn derive(seed: u64, key: &[u64]) -> u64 {
    key.iter().fold(mix64(seed), |acc, k| mix64(acc ^ mix64(*k)))
}

/// Domain tags so that unrelated draws never share a stream.
pub mod tag {
    pub const DEPLOYMENT: u64 = 1;
    pub const LINK: u64 = 2;
    pub const MOBILITY: u64 = 3;
    pub const BACKGROUND: u64 = 4;
    pub const DROP: u64 = 5;
}

pub fn rng(seed: u64, key: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, key))
}
