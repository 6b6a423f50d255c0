//! Stable 64-bit hashing helpers shared by ingest, MinHash and seeded splits.

use xxhash_rust::xxh3::{xxh3_64, xxh3_64_with_seed};

/// Fingerprint of file content; stable across platforms and releases.
pub fn content_hash(bytes: &[u8]) -> u64 {
    xxh3_64(bytes)
}

pub fn hash_with_seed(bytes: &[u8], seed: u64) -> u64 {
    xxh3_64_with_seed(bytes, seed)
}

/// SplitMix64 step; used to derive independent seeds from one master seed.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Murmur3 finaliser. A bijection on u64, so `fmix64(x ^ s)` behaves as a
/// seeded permutation of the hash space.
pub fn fmix64(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^= k >> 33;
    k
}

/// Derive a sub-seed for a named purpose so that stages sharing one master
/// seed do not share random streams.
pub fn derive_seed(master: u64, purpose: &str) -> u64 {
    splitmix64(master ^ xxh3_64(purpose.as_bytes()))
}
