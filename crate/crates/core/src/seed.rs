//! Deterministic seed derivation. Every source of randomness in the pipeline
//! draws from a ChaCha stream whose seed is derived from a named path of
//! string tags plus an index, so stages and repeats are independent yet
//! reproducible.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(mut acc: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        acc ^= b as u64;
        acc = acc.wrapping_mul(FNV_PRIME);
    }
    acc
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Derives a child seed from a base seed, a tag path and an index.
pub fn derive_seed(base: u64, tags: &[&str], index: u64) -> u64 {
    let mut acc = fnv1a(FNV_OFFSET, &base.to_le_bytes());
    for tag in tags {
        acc = fnv1a(acc, tag.as_bytes());
        acc = fnv1a(acc, &[0x1f]); // tag separator
    }
    acc = fnv1a(acc, &index.to_le_bytes());
    splitmix64(acc)
}

/// Deterministic generator for a derived seed.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable 64-bit content hash used for cache keys and stage manifests.
pub fn content_hash(bytes: &[u8]) -> u64 {
    splitmix64(fnv1a(FNV_OFFSET, bytes))
}
