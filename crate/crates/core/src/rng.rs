//! Counter-based deterministic random streams.
//!
//! Every random quantity in the crate (edge flags, coin angles, trial seeds)
//! is a pure function of a 64-bit seed and a stream index. Draws are
//! order-independent, so edge sampling and ensemble trials can be evaluated
//! from any worker in any order and still agree bit-for-bit.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The `index`-th 64-bit value of the stream identified by `seed`.
#[inline]
pub fn stream_u64(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// Uniform draw in `[0, 1)` at position `index` of the stream.
#[inline]
pub fn stream_unit(seed: u64, index: u64) -> f64 {
    // 53 high bits -> the full f64 mantissa range.
    (stream_u64(seed, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derives an independent child seed (per trial, per grid point, per purpose).
#[inline]
pub fn child_seed(seed: u64, index: u64) -> u64 {
    mix(stream_u64(seed, index) ^ GOLDEN_GAMMA)
}
