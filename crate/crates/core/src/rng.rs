//! Counter-based randomness.
//!
//! Every random bit is a pure function of `(seed, trial, key, stream)`, so a
//! cell's bit does not depend on which domain or which algorithm asks for it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Static configuration bits.
pub const STREAM_BITS: u64 = 0;
/// Re-randomization clocks of the dynamics.
pub const STREAM_DYNAMICS: u64 = 1;
/// Randomness owned by an algorithm (starting points and the like).
pub const STREAM_ALGORITHM: u64 = 2;
/// Two independent noise resamplings.
pub const STREAM_NOISE_A: u64 = 3;
pub const STREAM_NOISE_B: u64 = 4;
/// Re-randomized bits used by witness checks.
pub const STREAM_RESAMPLE: u64 = 5;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
pub fn hash(seed: u64, trial: u64, key: u64, stream: u64) -> u64 {
    let a = mix64(seed ^ 0x5851_f42d_4c95_7f2d);
    let b = mix64(a ^ trial);
    let c = mix64(b ^ key.rotate_left(17));
    mix64(c ^ stream.wrapping_mul(0xd605_bbb5_8c8a_bd73))
}

/// Threshold such that `h < threshold` has probability `p` for uniform `h`.
#[inline]
pub fn threshold(p: f64) -> u128 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        1u128 << 64
    } else {
        (p * 18_446_744_073_709_551_616.0) as u128
    }
}

#[inline]
pub fn bernoulli(h: u64, thr: u128) -> bool {
    (h as u128) < thr
}

/// Uniform in [0, 1) with 53 bits.
#[inline]
pub fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Uniform index in `0..n`, `n > 0`.
#[inline]
pub fn index(h: u64, n: usize) -> usize {
    ((h as u128 * n as u128) >> 64) as usize
}

/// A full generator for one `(seed, trial, key, stream)` cell of randomness.
pub fn stream_rng(seed: u64, trial: u64, key: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(hash(seed, trial, key, stream))
}
