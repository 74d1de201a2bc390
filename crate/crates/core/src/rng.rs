//! Seed plumbing.
//!
//! Every random object is addressed by a `(seed, stream_id)` pair. The pair
//! selects a ChaCha8 keystream, so draw `k` of a stream is a fixed function of
//! `(seed, stream_id, k)` and does not depend on how many workers ran or in
//! which order replicas were scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child stream id from a parent id and a tag.
pub fn derive(parent: u64, tag: u64) -> u64 {
    mix64(parent ^ mix64(tag))
}

/// FNV-1a hash of a name, used to give each experiment its own stream family.
pub fn name_tag(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Uniform on [0, 1) from the top 53 bits.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draw `k` of the uniform stream, by random access.
pub fn uniform_at(seed: u64, stream_id: u64, k: u64) -> f64 {
    let mut rng = stream(seed, stream_id);
    rng.set_word_pos(2 * k as u128);
    unit_f64(rng.next_u64())
}
