//! Deterministic derivation of child seeds from a master seed.
//!
//! Every stochastic component in this crate takes an explicit `u64` seed.
//! Nested components (the forests inside a fitted model, the trees inside a
//! forest, the replications inside a validation suite) derive their own seeds
//! with [`derive_seed`], so results do not depend on execution order and
//! parallel work can be scheduled freely without losing reproducibility.
//!
//! The module also hosts [`uniform_below`], the one bounded-integer sampler
//! used everywhere a permutation, bootstrap draw, or feature subsample is
//! needed, so those procedures depend only on the raw ChaCha8 stream and not
//! on any external library's sampling internals.

use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer (Steele, Lea and Flood's constants). Bijective on
/// `u64`, so distinct inputs always produce distinct outputs.
fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Weyl increment used by SplitMix64 to advance its state.
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Returns the seed for child stream `stream` of a component seeded with
/// `master`.
///
/// This is the `(stream + 1)`-th output of a SplitMix64 generator whose state
/// starts at `master`, evaluated directly instead of by stepping, so any
/// stream index can be derived in O(1).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64_mix(master.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Unbiased draw from `0..bound` using Lemire's multiply-shift method with
/// rejection of the biased low range.
pub(crate) fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    loop {
        let x = rng.next_u64();
        let m = (x as u128) * (bound as u128);
        let low = m as u64;
        if low >= bound || low >= bound.wrapping_neg() % bound {
            return (m >> 64) as u64;
        }
    }
}
