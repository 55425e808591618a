//! Deterministic seed derivation. Every trial, restart and Monte Carlo stream
//! draws from its own `ChaCha8Rng` seeded by `derive_seed(base, index)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Base seed used whenever none is given, so bare runs are reproducible.
pub const DEFAULT_SEED: u64 = 1729;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `(base, index)` into an independent 64-bit seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(base: u64, index: u64) -> ChaCha8Rng {
    rng_from(derive_seed(base, index))
}
