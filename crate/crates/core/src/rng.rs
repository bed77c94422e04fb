//! Deterministic counter-based random streams.
//!
//! Every stochastic component derives a fresh ChaCha stream from a small set
//! of integers (seed, purpose tag, indices). Results are therefore identical
//! regardless of thread scheduling or evaluation order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a seed with up to three stream coordinates into a single 64-bit key.
pub fn mix(seed: u64, a: u64, b: u64, c: u64) -> u64 {
    let mut h = splitmix64(seed ^ 0x243f_6a88_85a3_08d3);
    h = splitmix64(h ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    h = splitmix64(h ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f));
    splitmix64(h ^ c.wrapping_mul(0x1656_67b1_9e37_79f9))
}

/// A ChaCha stream keyed by (seed, tag, a, b).
pub fn stream(seed: u64, tag: u64, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, tag, a, b))
}
