//! Seed splitting.
//!
//! Every random quantity indexed by a trial (or sample block) draws from its
//! own ChaCha12 stream: the key comes from the user seed and the 64-bit
//! stream id is the trial index. Results therefore depend only on
//! `(seed, index)` and never on how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type StreamRng = ChaCha12Rng;

/// Generator for stream `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mixes a parent seed with a label into a child seed (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
