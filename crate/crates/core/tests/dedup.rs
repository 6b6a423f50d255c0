mod common;

use std::collections::{BTreeMap, BTreeSet};

use forge_core::dedup::{
    assign_splits, dedup_against, exact_jaccard, find_near_duplicates, ks_distance, minhash_signature, split_by_repo,
    DedupConfig, Split, SplitConfig, SplitManifest, SplitSample, DEFAULT_NUM_PERM, DEFAULT_SHINGLE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mutate(rng: &mut impl Rng, tokens: &[String], p: f64) -> Vec<String> {
    tokens.iter().map(|t| if rng.gen_bool(p) { format!("m{}", rng.gen_range(0..100_000)) } else { t.clone() }).collect()
}

#[test]
fn minhash_tracks_exact_jaccard() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut err = 0.0;
    for _ in 0..300 {
        let len = rng.gen_range(20..200);
        let a = common::random_tokens(&mut rng, len, 5000);
        let p = rng.gen_range(0.0..0.3);
        let b = mutate(&mut rng, &a, p);
        let sa = minhash_signature(&a, DEFAULT_NUM_PERM, DEFAULT_SHINGLE, 9);
        let sb = minhash_signature(&b, DEFAULT_NUM_PERM, DEFAULT_SHINGLE, 9);
        err += (sa.agreement(&sb) - exact_jaccard(&a, &b, DEFAULT_SHINGLE)).abs();
    }
    assert!(err / 300.0 <= 0.05, "{}", err / 300.0);
}

#[test]
fn disjoint_and_half_overlap() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a: Vec<String> = (0..200).map(|i| format!("a{i}")).collect();
    let b: Vec<String> = (0..200).map(|i| format!("b{i}")).collect();
    let (sa, sb) = (minhash_signature(&a, 256, 5, 0), minhash_signature(&b, 256, 5, 0));
    assert!(sa.agreement(&sb) <= 0.05);
    // Shingle sets of 300 with 200 shared give Jaccard exactly 0.5.
    let mut total = 0.0;
    for seed in 0..50 {
        let shared = common::random_tokens(&mut rng, 204, 1_000_000);
        let left: Vec<String> = common::random_tokens(&mut rng, 100, 1_000_000).into_iter().chain(shared.clone()).collect();
        let right: Vec<String> = shared.into_iter().chain(common::random_tokens(&mut rng, 100, 1_000_000)).collect();
        assert!((exact_jaccard(&left, &right, 5) - 0.5).abs() < 0.01);
        total += minhash_signature(&left, 256, 5, seed).agreement(&minhash_signature(&right, 256, 5, seed));
    }
    assert!((total / 50.0 - 0.5).abs() < 0.02, "{}", total / 50.0);
}

#[test]
fn short_sequences_and_determinism() {
    let t: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let s = minhash_signature(&t, 64, 5, 3);
    assert!(s.short);
    assert_eq!(s, minhash_signature(&t, 64, 5, 3));
    assert_ne!(s.values, minhash_signature(&t, 64, 5, 4).values);
    assert_eq!(s.agreement(&minhash_signature(&t, 64, 5, 3)), 1.0);
    let empty = minhash_signature(&[], 64, 5, 3);
    assert_eq!(empty.agreement(&minhash_signature(&[], 64, 5, 3)), 1.0);
}

#[test]
fn planted_duplicates_all_found() {
    let (corpus, holdout, planted) = common::planted_corpus(4);
    for exact_confirm in [false, true] {
        let cfg = DedupConfig { exact_confirm, ..Default::default() };
        let found: BTreeSet<String> =
            dedup_against(&corpus, &holdout, &cfg, 17).unwrap().into_iter().map(|m| m.corpus_key).collect();
        assert_eq!(found, planted);
    }
    let sig = vec![("x".to_string(), minhash_signature(&holdout[0].code_tokens, 256, 5, 0))];
    assert!(find_near_duplicates(&sig, &sig, 30, 8, 0.8).is_err());
    assert!(find_near_duplicates(&[], &[], 0, 8, 0.8).is_err());
    assert_eq!(find_near_duplicates(&sig, &sig, 32, 8, 0.8).unwrap().len(), 1);
}

fn check_split(samples: &[SplitSample], m: &SplitManifest, ratios: [f64; 3]) {
    let mut repo_split: BTreeMap<&str, Split> = BTreeMap::new();
    for a in m.assignments.values() {
        assert_eq!(*repo_split.entry(&a.repo).or_insert(a.split), a.split, "repo {} straddles splits", a.repo);
    }
    let all: Vec<usize> = samples.iter().map(|s| s.code_len).collect();
    for (i, split) in Split::ASSIGNABLE.into_iter().enumerate() {
        let part: Vec<usize> =
            samples.iter().filter(|s| m.assignments[&s.key].split == split).map(|s| s.code_len).collect();
        assert!((part.len() as f64 / samples.len() as f64 - ratios[i]).abs() <= 0.01, "{split:?}: {}", part.len());
        assert!(ks_distance(&part, &all) <= 0.1, "{split:?}");
    }
}

#[test]
fn split_contracts_on_synthetic_corpus() {
    let samples = common::split_corpus(3000, 120, 8);
    let cfg = SplitConfig::default();
    let m = assign_splits(&samples, &cfg, 42).unwrap();
    check_split(&samples, &m, cfg.ratios);
    for a in m.assignments.values() {
        if a.subsets.contains(&"small".to_string()) {
            assert!(a.subsets.contains(&"medium".to_string()));
        }
        if !a.subsets.is_empty() {
            assert_eq!(a.split, Split::Train);
        }
    }
    assert_eq!(m, assign_splits(&samples, &cfg, 42).unwrap());
    assert_ne!(m, assign_splits(&samples, &cfg, 43).unwrap());
}

#[test]
fn split_edge_cases() {
    let samples = common::split_corpus(100, 2, 1);
    assert!(split_by_repo(&samples, [0.8, 0.1, 0.1], 0).is_err());
    let m = split_by_repo(&samples, [0.5, 0.5, 0.0], 0).unwrap();
    assert_eq!(m.diagnostics.counts[2], 0);
    assert!(split_by_repo(&[], [1.0, 0.0, 0.0], 0).is_err());
    assert!(assign_splits(&samples, &SplitConfig { ratios: [0.9, 0.2, 0.0], ..Default::default() }, 0).is_err());
}

#[test]
fn excluded_samples_leave_the_splits() {
    let samples = common::split_corpus(500, 40, 2);
    let mut m = assign_splits(&samples, &SplitConfig::default(), 3).unwrap();
    m.exclude("dup/1", "elsewhere");
    assert_eq!(m.keys_in(Split::Excluded).collect::<Vec<_>>(), ["dup/1"]);
    let total: usize = Split::ASSIGNABLE.iter().map(|s| m.keys_in(*s).count()).sum();
    assert_eq!(total, 500);
}
