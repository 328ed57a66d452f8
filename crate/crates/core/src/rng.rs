//! Deterministic, splittable random streams.
//!
//! Every random decision in the simulator draws from a ChaCha12 stream whose
//! seed is derived from a root seed plus a label (and optionally an index).
//! Topology construction, originator-pool selection and each simulation step
//! get independent streams, so the same overlay can be reused across runs and
//! a run can be sharded by step range and merged back without any drift.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// splitmix64 finalizer; good avalanche for cheap seed mixing.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a sub-seed from `(seed, label)`.
pub fn derive(seed: u64, label: &str) -> u64 {
    // FNV-1a over the label, folded into the root seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix(seed ^ h)
}

/// Derives a sub-seed from `(seed, label, index)`; used for per-step streams.
pub fn derive_indexed(seed: u64, label: &str, index: u64) -> u64 {
    mix(derive(seed, label) ^ mix(index))
}

/// A deterministic generator for a derived seed.
pub fn stream(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}
