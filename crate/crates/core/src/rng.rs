//! Deterministic RNG substream derivation.
//!
//! Every sampling site owns a substream keyed by `(seed, tags…)`, so that
//! refining a simulation (deeper shells, more replicates) never perturbs the
//! draws of the parts that were already sampled.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// SplitMix64 finalizer; decorrelates structured tag tuples.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent generator for the substream `(seed, tags…)`.
pub fn substream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = mix(seed ^ 0x6c62_272e_07bb_0142);
    for &t in tags {
        state = mix(state ^ mix(t));
    }
    ChaCha8Rng::seed_from_u64(state)
}

/// Tag namespaces for the sampling sites used across the crate.
pub mod tags {
    /// Poisson shell sampling, keyed further by the shell index.
    pub const SHELL: u64 = 1;
    /// Brownian increments of an assembled path.
    pub const GAUSSIAN: u64 = 2;
    /// Per-replicate derivation in Monte Carlo loops.
    pub const REPLICATE: u64 = 3;
    /// Lacunary coefficient positions, keyed by (direction, generation).
    pub const LACUNARY: u64 = 4;
}
