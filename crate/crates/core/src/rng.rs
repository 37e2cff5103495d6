//! Seed plumbing. All randomness flows from a single 64-bit seed through
//! named sub-streams (split, init, shuffle, sgns, synth, ...), so any stage
//! can be re-run in isolation and still land on the same stream.
//!
//! Derivation: FNV-1a over the stream name, XORed into the run seed, then
//! one SplitMix64 finalization step; the result seeds a ChaCha8 stream
//! cipher RNG (portable across platforms).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive the 64-bit seed of a named sub-stream.
pub fn derive_seed(seed: u64, name: &str) -> u64 {
    splitmix64(seed ^ fnv1a(name.as_bytes()))
}

/// RNG for a named sub-stream of `seed`.
pub fn stream(seed: u64, name: &str) -> Stream {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, name))
}
