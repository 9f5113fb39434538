//! Seed derivation.
//!
//! Every random quantity in an instance is drawn from its own ChaCha8 stream,
//! keyed by `(seed, label, index)` through a SplitMix64-style finalizer. A
//! row's stream never depends on how many draws other rows made, so rows can
//! be sampled in any order or in parallel with identical results.
//!
//! Gaussian variates come from `rand_distr::StandardNormal` (the ziggurat
//! method of rand_distr 0.4), scaled by sigma. Seeds are portable as long as
//! those crate versions are unchanged.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed stream labels. Changing any of these changes every generated instance.
pub mod label {
    pub const FEATURES: u64 = 0x6665_6174;
    pub const NOISE: u64 = 0x6e6f_6973;
    pub const SUBSAMPLE: u64 = 0x7375_6273;
    pub const PERMUTATION: u64 = 0x7065_726d;
    pub const COPY_G: u64 = 0x636f_7067;
    pub const COPY_G_PRIME: u64 = 0x636f_7070;
    pub const TRIAL: u64 = 0x7472_6961;
    pub const VALIDATE: u64 = 0x7661_6c69;
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a label.
#[inline]
pub fn derive(seed: u64, label: u64) -> u64 {
    mix64(mix64(seed) ^ label.rotate_left(17))
}

/// Derives a child seed from a parent seed and a sequence of indices.
pub fn derive_indexed(seed: u64, indices: &[u64]) -> u64 {
    indices
        .iter()
        .fold(mix64(seed), |acc, &i| mix64(acc ^ mix64(i.wrapping_add(0x51_7cc1_b727_220a))))
}

/// The generator for `(seed, label, index)`.
pub fn stream(seed: u64, label: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_indexed(derive(seed, label), &[index]))
}
