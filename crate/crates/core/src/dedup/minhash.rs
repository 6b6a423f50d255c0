use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::hashing::{derive_seed, fmix64, hash_with_seed, splitmix64};

pub const DEFAULT_NUM_PERM: usize = 256;
pub const DEFAULT_SHINGLE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub values: Vec<u64>,
    pub seed: u64,
    pub shingle: usize,
    /// Fewer tokens than the shingle width; the whole sequence was hashed
    /// as a single shingle.
    pub short: bool,
}

impl MinHashSignature {
    /// Fraction of equal components, an estimate of shingle Jaccard.
    pub fn agreement(&self, other: &MinHashSignature) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "signature lengths differ");
        if self.values.is_empty() {
            return 0.0;
        }
        let same = self.values.iter().zip(&other.values).filter(|(a, b)| a == b).count();
        same as f64 / self.values.len() as f64
    }
}

fn hash_tokens(tokens: &[String]) -> u64 {
    let mut buf = Vec::with_capacity(tokens.iter().map(|t| t.len() + 1).sum());
    for t in tokens {
        buf.extend_from_slice(t.as_bytes());
        buf.push(0x1f);
    }
    hash_with_seed(&buf, 0)
}

/// Hashes of the distinct `w`-token shingles. Sequences shorter than `w`
/// (including empty ones) yield one shingle for the whole sequence.
pub fn shingle_set(tokens: &[String], w: usize) -> BTreeSet<u64> {
    assert!(w > 0, "shingle width must be positive");
    if tokens.len() < w {
        return BTreeSet::from([hash_tokens(tokens)]);
    }
    tokens.windows(w).map(hash_tokens).collect()
}

fn perm_seeds(num_perm: usize, seed: u64) -> Vec<u64> {
    let mut state = derive_seed(seed, "minhash");
    (0..num_perm)
        .map(|_| {
            state = splitmix64(state);
            state
        })
        .collect()
}

pub fn minhash_signature(tokens: &[String], num_perm: usize, w: usize, seed: u64) -> MinHashSignature {
    let shingles = shingle_set(tokens, w);
    let values = perm_seeds(num_perm, seed)
        .into_iter()
        .map(|s| shingles.iter().map(|h| fmix64(h ^ s)).min().expect("at least one shingle"))
        .collect();
    MinHashSignature { values, seed, shingle: w, short: tokens.len() < w }
}

/// Exact Jaccard of the two shingle sets.
pub fn exact_jaccard(a: &[String], b: &[String], w: usize) -> f64 {
    let (sa, sb) = (shingle_set(a, w), shingle_set(b, w));
    let inter = sa.intersection(&sb).count();
    let union = sa.len() + sb.len() - inter;
    inter as f64 / union as f64
}
