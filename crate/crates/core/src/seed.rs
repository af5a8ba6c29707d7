//! Keyed random substreams.
//!
//! Every random quantity is drawn from its own ChaCha8 stream whose 64-bit seed
//! is derived from `(seed, domain, a, b)` by chaining the SplitMix64 finalizer:
//!
//! ```text
//! h0 = mix(seed + G)
//! h1 = mix(h0 ^ (domain + G))
//! h2 = mix(h1 ^ (a + 2G))
//! h3 = mix(h2 ^ (b + 3G))        G = 0x9E37_79B9_7F4A_7C15
//! ```
//!
//! Results therefore depend only on the key, never on iteration order or on
//! how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Domain tags separating the kinds of draws that share a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Class = 1,
    Edge = 2,
    SelfLoop = 3,
    Replicate = 4,
}

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn substream_seed(seed: u64, domain: Domain, a: u64, b: u64) -> u64 {
    let h = mix64(seed.wrapping_add(GOLDEN));
    let h = mix64(h ^ (domain as u64).wrapping_add(GOLDEN));
    let h = mix64(h ^ a.wrapping_add(GOLDEN.wrapping_mul(2)));
    mix64(h ^ b.wrapping_add(GOLDEN.wrapping_mul(3)))
}

pub fn substream(seed: u64, domain: Domain, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, domain, a, b))
}
