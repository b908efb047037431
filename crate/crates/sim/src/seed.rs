//! Stable seed derivation.
//!
//! `derive_seed(parent, index)` is the SplitMix64 finaliser applied to
//! `parent + (index + 1) * 0x9E3779B97F4A7C15` (wrapping). Sweep point `i`
//! uses `derive_seed(master_seed, i)`; Monte-Carlo window `j` of a point uses
//! `derive_seed(point_seed, j)`. Each window seeds its own `ChaCha8Rng` with
//! `seed_from_u64`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(parent: u64, index: u64) -> u64 {
    mix64(parent.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

pub fn window_rng(point_seed: u64, window: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(point_seed, window))
}
