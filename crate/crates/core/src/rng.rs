//! Seed derivation for reproducible, order-independent random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type Rng = ChaCha12Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a stream label (trial index,
/// purpose tag, ...). Children of distinct labels are statistically
/// independent, and the result depends only on `(seed, label)`, so trials can
/// be scheduled on any number of threads.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    mix(mix(seed) ^ label.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Stream labels used inside one trial.
pub mod stream {
    pub const SIGNAL: u64 = 1;
    pub const MATRIX: u64 = 2;
    pub const NOISE: u64 = 3;
    pub const COEFFICIENTS: u64 = 4;
}
