//! Seed derivation shared by every randomized component.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh3::xxh3_64_with_seed;

/// Derives an independent child seed from a root seed and a label.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    xxh3_64_with_seed(label.as_bytes(), root)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
