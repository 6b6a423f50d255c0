use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::minhash::{exact_jaccard, MinHashSignature};
use crate::error::{Error, Result};
use crate::hashing::hash_with_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DupMatch {
    pub corpus_key: String,
    pub holdout_key: String,
    pub est_jaccard: f64,
}

/// Banded index over holdout signatures. Built once, then read
/// concurrently.
pub struct LshIndex<'a> {
    bands: usize,
    rows: usize,
    buckets: HashMap<(usize, u64), Vec<usize>>,
    entries: &'a [(String, MinHashSignature)],
}

fn band_hash(values: &[u64]) -> u64 {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    hash_with_seed(&bytes, 0)
}

impl<'a> LshIndex<'a> {
    pub fn build(entries: &'a [(String, MinHashSignature)], bands: usize, rows: usize) -> Result<Self> {
        let mut buckets: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
        for (i, (key, sig)) in entries.iter().enumerate() {
            check_banding(sig, bands, rows).map_err(|e| Error::Config(format!("holdout {key}: {e}")))?;
            for b in 0..bands {
                buckets.entry((b, band_hash(&sig.values[b * rows..(b + 1) * rows]))).or_default().push(i);
            }
        }
        Ok(LshIndex { bands, rows, buckets, entries })
    }

    /// Holdout indices sharing at least one band with `sig`, ascending.
    pub fn candidates(&self, sig: &MinHashSignature) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.bands)
            .filter_map(|b| self.buckets.get(&(b, band_hash(&sig.values[b * self.rows..(b + 1) * self.rows]))))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn check_banding(sig: &MinHashSignature, bands: usize, rows: usize) -> std::result::Result<(), String> {
    if bands == 0 || rows == 0 || bands * rows != sig.values.len() {
        return Err(format!("banding {bands}x{rows} does not cover {} permutations", sig.values.len()));
    }
    Ok(())
}

/// Corpus samples whose estimated Jaccard with some holdout sample reaches
/// `threshold`, sorted by (corpus key, holdout key).
pub fn find_near_duplicates(
    corpus: &[(String, MinHashSignature)],
    holdout: &[(String, MinHashSignature)],
    bands: usize,
    rows: usize,
    threshold: f64,
) -> Result<Vec<DupMatch>> {
    if bands == 0 || rows == 0 {
        return Err(Error::Config(format!("banding {bands}x{rows} is empty")));
    }
    let index = LshIndex::build(holdout, bands, rows)?;
    for (key, sig) in corpus {
        check_banding(sig, bands, rows).map_err(|e| Error::Config(format!("corpus {key}: {e}")))?;
    }
    let mut found: Vec<DupMatch> = corpus
        .par_iter()
        .flat_map_iter(|(ckey, csig)| {
            index.candidates(csig).into_iter().filter_map(move |h| {
                let (hkey, hsig) = &index.entries[h];
                let est = csig.agreement(hsig);
                (est >= threshold).then(|| DupMatch { corpus_key: ckey.clone(), holdout_key: hkey.clone(), est_jaccard: est })
            })
        })
        .collect();
    found.sort_by(|a, b| a.corpus_key.cmp(&b.corpus_key).then_with(|| a.holdout_key.cmp(&b.holdout_key)));
    Ok(found)
}

/// Replace estimates by exact shingle Jaccard and keep matches that still
/// reach `threshold`. Keys missing from the token maps are dropped.
pub fn confirm_exact(
    matches: Vec<DupMatch>,
    corpus_tokens: &HashMap<String, Vec<String>>,
    holdout_tokens: &HashMap<String, Vec<String>>,
    w: usize,
    threshold: f64,
) -> Vec<DupMatch> {
    matches
        .into_par_iter()
        .filter_map(|m| {
            let exact = exact_jaccard(corpus_tokens.get(&m.corpus_key)?, holdout_tokens.get(&m.holdout_key)?, w);
            (exact >= threshold).then_some(DupMatch { est_jaccard: exact, ..m })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::minhash::minhash_signature;
    use super::*;

    fn sig(s: &str) -> MinHashSignature {
        let t: Vec<String> = s.split_whitespace().map(String::from).collect();
        minhash_signature(&t, 256, 5, 7)
    }

    #[test]
    fn identical_found_and_empty_holdout() {
        let text = "public int add ( int a , int b ) { return a + b ; }";
        let corpus = vec![("c1".to_string(), sig(text)), ("c2".to_string(), sig("fn main ( ) { println ! ( ) ; }"))];
        let holdout = vec![("h1".to_string(), sig(text))];
        let m = find_near_duplicates(&corpus, &holdout, 32, 8, 0.8).unwrap();
        assert_eq!(m, [DupMatch { corpus_key: "c1".into(), holdout_key: "h1".into(), est_jaccard: 1.0 }]);
        assert!(find_near_duplicates(&corpus, &[], 32, 8, 0.8).unwrap().is_empty());
        assert!(matches!(find_near_duplicates(&corpus, &holdout, 30, 8, 0.8), Err(Error::Config(_))));
    }
}
