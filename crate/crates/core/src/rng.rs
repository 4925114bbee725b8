//! Seeded randomness. Every stochastic stage takes a `u64` seed and derives
//! its own stream so stages never share RNG state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StageRng = ChaCha8Rng;

/// RNG for a named pipeline stage; the same (seed, stage) pair always yields
/// the same stream.
pub fn stage_rng(seed: u64, stage: &str) -> StageRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a64(stage.as_bytes()).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Rounds half away from zero.
pub fn round_half_away(x: f64) -> f64 {
    libm::round(x)
}
