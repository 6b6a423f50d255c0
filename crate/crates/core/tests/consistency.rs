mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use forge_core::consistency::{
    baseline_score, evaluate_auc, gate, generate_negatives, stratify_by_confidence, Backend, Band, Decision,
    LabeledPair, NaturalPair, Origin, ScoreRecord,
};
use forge_core::{Error, LanguageId};
use proptest::prelude::*;

fn brute_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut num2, mut pos, mut neg) = (0u64, 0u64, 0u64);
    for (i, li) in labels.iter().enumerate() {
        if *li == 1 {
            pos += 1;
        } else {
            neg += 1;
            continue;
        }
        for (j, lj) in labels.iter().enumerate() {
            if *lj == 0 {
                num2 += match scores[i].partial_cmp(&scores[j]).unwrap() {
                    std::cmp::Ordering::Greater => 2,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Less => 0,
                };
            }
        }
    }
    num2 as f64 / (2 * pos * neg) as f64
}

fn validate_negatives(naturals: &[NaturalPair], out: &[LabeledPair], ratio: f64) {
    let by_key: HashMap<&str, &NaturalPair> = naturals.iter().map(|p| (p.key.as_str(), p)).collect();
    let positives: Vec<&LabeledPair> = out.iter().filter(|p| p.label == 1).collect();
    assert_eq!(positives.len(), naturals.len());
    assert!(positives.iter().all(|p| p.origin == Origin::Natural && p.code_key == p.doc_key));
    let mut per_lang: BTreeMap<LanguageId, usize> = BTreeMap::new();
    for p in naturals {
        *per_lang.entry(p.language).or_default() += 1;
    }
    let mut neg_per_lang: BTreeMap<LanguageId, usize> = BTreeMap::new();
    for n in out.iter().filter(|p| p.label == 0) {
        assert_eq!(n.origin, Origin::Shuffled);
        assert_ne!(n.code_key, n.doc_key, "self pair");
        let (c, d) = (by_key[n.code_key.as_str()], by_key[n.doc_key.as_str()]);
        assert_eq!(c.language, n.language);
        assert_eq!(d.language, n.language, "cross-language negative");
        assert_eq!(c.code, n.code);
        assert_eq!(d.docstring, n.docstring);
        *neg_per_lang.entry(n.language).or_default() += 1;
    }
    for (lang, n) in per_lang {
        let want = if n < 2 { 0 } else { (ratio * n as f64).ceil() as usize };
        assert_eq!(neg_per_lang.get(&lang).copied().unwrap_or(0), want, "{lang}");
    }
}

#[test]
fn thousand_negatives_validated() {
    let naturals = common::synthetic_pairs(1000, 11);
    let out = generate_negatives(&naturals, 7, 1.0);
    validate_negatives(&naturals, &out, 1.0);
    // With ratio 1 each code and each docstring is used exactly once.
    let negs: Vec<&LabeledPair> = out.iter().filter(|p| p.label == 0).collect();
    assert_eq!(negs.len(), 1000);
    assert_eq!(negs.iter().map(|p| &p.code_key).collect::<BTreeSet<_>>().len(), 1000);
    assert_eq!(negs.iter().map(|p| &p.doc_key).collect::<BTreeSet<_>>().len(), 1000);

    let again = generate_negatives(&naturals, 7, 1.0);
    assert_eq!(serde_json::to_string(&out).unwrap(), serde_json::to_string(&again).unwrap());
    let other = generate_negatives(&naturals, 8, 1.0);
    assert_ne!(serde_json::to_string(&out).unwrap(), serde_json::to_string(&other).unwrap());
}

#[test]
fn negative_ratios_and_tiny_buckets() {
    let mut naturals = common::synthetic_pairs(120, 3);
    naturals.truncate(101);
    for ratio in [0.3, 1.0, 2.0] {
        validate_negatives(&naturals, &generate_negatives(&naturals, 1, ratio), ratio);
    }
    let one = &naturals[..1];
    assert!(generate_negatives(one, 1, 1.0).iter().all(|p| p.label == 1));
}

#[test]
fn auc_matches_brute_force_on_200() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    for round in 0..50 {
        let levels = [3, 10, 1000][round % 3];
        let scores: Vec<f64> = (0..200).map(|_| rand::Rng::gen_range(&mut rng, 0..levels) as f64 / levels as f64).collect();
        let mut labels: Vec<u8> = (0..200).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect();
        labels[0] = 0;
        labels[1] = 1;
        assert_eq!(evaluate_auc(&scores, &labels).unwrap(), brute_auc(&scores, &labels));
    }
    assert!(matches!(evaluate_auc(&[0.3; 4], &[0; 4]), Err(Error::SingleClass)));
}

#[test]
fn gate_requires_every_score() {
    let scores = HashMap::from([("a".to_string(), 0.9)]);
    match gate(vec!["a", "b", "c"], |s| s.to_string(), &scores, 0.5) {
        Err(Error::MissingScores(m)) => assert_eq!(m, ["b", "c"]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn baseline_examples() {
    assert!(baseline_score("def add_two_numbers(a, b): return a + b", "Add two numbers.") > 0.5);
    assert!(baseline_score("def add_two_numbers(a, b): return a + b", "Open the network socket.") < 0.5);
    assert_eq!(baseline_score("", "Anything at all."), 0.0);
}

#[test]
fn audit_stratification_covers_bands() {
    let records: Vec<ScoreRecord> = (0..300)
        .map(|i| ScoreRecord {
            key: format!("k{i}"),
            language: LanguageId::Go,
            score: i as f64 / 299.0,
            backend: Backend::Baseline,
            decision: if i as f64 / 299.0 >= 0.5 { Decision::Keep } else { Decision::Drop },
            fail_open: false,
        })
        .collect();
    let sample = stratify_by_confidence(&records, 0.5, 10, 3);
    let mut per: BTreeMap<Band, usize> = BTreeMap::new();
    for (band, r) in &sample {
        assert_eq!(Band::of(r.score, 0.5), Some(*band));
        *per.entry(*band).or_default() += 1;
    }
    assert_eq!(per.values().copied().collect::<Vec<_>>(), [10, 10, 10]);
}

proptest! {
    #[test]
    fn auc_invariant_under_monotone_transform(
        raw in proptest::collection::vec((0u32..50, 0u8..2), 2..120),
        scale in 0.1f64..10.0,
        shift in -5.0f64..5.0,
    ) {
        let mut labels: Vec<u8> = raw.iter().map(|r| r.1).collect();
        labels[0] = 0;
        labels[1] = 1;
        let scores: Vec<f64> = raw.iter().map(|r| r.0 as f64 / 50.0).collect();
        let base = evaluate_auc(&scores, &labels).unwrap();
        let transformed: Vec<f64> = scores.iter().map(|s| (s * scale + shift).exp()).collect();
        prop_assert_eq!(evaluate_auc(&transformed, &labels).unwrap(), base);
        prop_assert_eq!(base, brute_auc(&scores, &labels));
        let flipped: Vec<u8> = labels.iter().map(|l| 1 - l).collect();
        prop_assert!((evaluate_auc(&scores, &flipped).unwrap() - (1.0 - base)).abs() < 1e-12);
    }

    #[test]
    fn gate_is_monotone_in_threshold(
        scores in proptest::collection::vec(0.0f64..=1.0, 1..80),
        t1 in 0.0f64..=1.0,
        t2 in 0.0f64..=1.0,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let map: HashMap<String, f64> = scores.iter().enumerate().map(|(i, s)| (i.to_string(), *s)).collect();
        let keys: Vec<String> = map.keys().cloned().collect();
        let a = gate(keys.clone(), |k| k.clone(), &map, lo).unwrap();
        let b = gate(keys.clone(), |k| k.clone(), &map, hi).unwrap();
        let kept_lo: BTreeSet<&String> = a.kept.iter().collect();
        prop_assert!(b.kept.iter().all(|k| kept_lo.contains(k)));
        prop_assert_eq!(a.kept.len() + a.dropped.len(), keys.len());
        prop_assert!(a.kept.iter().all(|k| map[k] >= lo) && a.dropped.iter().all(|k| map[k] < lo));
    }

    #[test]
    fn baseline_score_in_unit_interval(code in "[ -~\n]{0,80}", doc in "[ -~\n]{0,80}") {
        let s = baseline_score(&code, &doc);
        prop_assert!((0.0..=1.0).contains(&s));
    }
}
