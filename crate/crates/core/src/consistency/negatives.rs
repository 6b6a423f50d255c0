use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LabeledPair, NaturalPair, Origin};
use crate::hashing::derive_seed;
use crate::language::LanguageId;

/// Uniform random cyclic permutation (no fixed points for `n >= 2`).
pub fn sattolo(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..i);
        p.swap(i, j);
    }
    p
}

/// All natural pairs (label 1) plus `ceil(ratio * n)` shuffled pairs
/// (label 0) per language. Shuffled pairs come from cyclic permutations, so
/// no code is paired with its own docstring.
pub fn generate_negatives(pairs: &[NaturalPair], seed: u64, ratio: f64) -> Vec<LabeledPair> {
    let mut buckets: BTreeMap<LanguageId, Vec<&NaturalPair>> = BTreeMap::new();
    for p in pairs {
        buckets.entry(p.language).or_default().push(p);
    }
    let mut out: Vec<LabeledPair> = pairs.iter().map(LabeledPair::natural).collect();
    for (lang, bucket) in buckets {
        let n = bucket.len();
        if n < 2 {
            log::warn!("{lang}: {n} pair(s), no derangement possible; skipping negatives");
            continue;
        }
        let want = (ratio * n as f64).ceil() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &format!("negatives:{lang}")));
        let mut made = 0;
        while made < want {
            let perm = sattolo(n, &mut rng);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for i in order.into_iter().take(want - made) {
                let code = bucket[i];
                let doc = bucket[perm[i]];
                out.push(LabeledPair {
                    code_key: code.key.clone(),
                    doc_key: doc.key.clone(),
                    code: code.code.clone(),
                    docstring: doc.docstring.clone(),
                    language: lang,
                    label: 0,
                    origin: Origin::Shuffled,
                });
                made += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn natural(i: usize, lang: LanguageId) -> NaturalPair {
        NaturalPair { key: format!("k{i}"), code: format!("c{i}"), docstring: format!("d{i}"), language: lang }
    }

    #[test]
    fn two_pairs_swap() {
        let pairs = vec![natural(1, LanguageId::Python), natural(2, LanguageId::Python)];
        let out = generate_negatives(&pairs, 0, 1.0);
        let mut neg: Vec<(String, String)> =
            out.iter().filter(|p| p.label == 0).map(|p| (p.code.clone(), p.docstring.clone())).collect();
        neg.sort();
        assert_eq!(neg, [("c1".to_string(), "d2".to_string()), ("c2".to_string(), "d1".to_string())]);
        assert_eq!(out.iter().filter(|p| p.label == 1).count(), 2);
    }

    #[test]
    fn empty_and_singleton() {
        assert!(generate_negatives(&[], 1, 1.0).is_empty());
        let out = generate_negatives(&[natural(0, LanguageId::Go)], 1, 1.0);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].label, 1);
    }

    #[test]
    fn sattolo_has_no_fixed_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..50 {
            let p = sattolo(n, &mut rng);
            assert!(p.iter().enumerate().all(|(i, j)| i != *j));
        }
    }

    #[test]
    fn fractional_ratio_rounds_up() {
        let pairs: Vec<NaturalPair> = (0..10).map(|i| natural(i, LanguageId::Java)).collect();
        let out = generate_negatives(&pairs, 5, 0.25);
        assert_eq!(out.iter().filter(|p| p.label == 0).count(), 3);
        let out = generate_negatives(&pairs, 5, 2.5);
        assert_eq!(out.iter().filter(|p| p.label == 0).count(), 25);
        assert!(out.iter().filter(|p| p.label == 0).all(|p| p.code_key != p.doc_key));
    }
}
