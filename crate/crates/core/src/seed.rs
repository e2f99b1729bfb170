//! Deterministic seed derivation.
//!
//! Sweeps and generators derive per-run seeds from a master seed plus a few
//! integer coordinates (grid indices, repetition number, restart counter).
//! The mixing function is fixed so results reproduce across machines and
//! concurrency levels.

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on u64.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Fold a sequence of components into one seed: start from the master seed
/// and absorb each component through SplitMix64.
pub fn mix(master: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &p in parts {
        state = splitmix64(state ^ splitmix64(p));
    }
    state
}
