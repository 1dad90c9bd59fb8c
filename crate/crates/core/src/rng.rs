//! Seed derivation for independent deterministic RNG streams.
//!
//! Orchestration code needs several unrelated random streams (dataset
//! shuffling, augmentation, per-tree bootstraps, ...) derived from one
//! user-facing seed. Deriving them by mixing the base seed with a stream
//! tag keeps streams statistically independent while remaining stable
//! across runs and platforms.

/// Derives a sub-seed from `base` and a stream `tag`.
///
/// Uses the SplitMix64 finalizer, which is a bijective avalanche mix: two
/// distinct `(base, tag)` pairs map to the same output only with the
/// ordinary 2^-64 collision probability of a good mixer.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    let mut z = base ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed from `base` and a textual stream label.
///
/// The label is folded with FNV-1a before mixing, so call sites can use
/// readable names ("augment", "patch-subsample") instead of magic numbers.
pub fn derive_seed_str(base: u64, label: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    derive_seed(base, h)
}
