//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::AssertUnwindSafe;
use std::path::Path;
use std::time::{Duration, Instant};

use forge_core::config::PipelineConfig;
use forge_core::consistency::{evaluate_auc, gate, generate_negatives, BaselineScorer, PairRef, Scorer};
use forge_core::dedup::{
    assign_splits, dedup_against, exact_jaccard, ks_distance, minhash_signature, DedupConfig, Split, SplitConfig,
};
use forge_core::filters::update::apply_update;
use forge_core::filters::{apply_remove_filters, apply_update_filters, FilterEngine, FilterId, Verdict};
use forge_core::ingest::{scan_corpus, RawSourceFile, ScanOptions};
use forge_core::pipeline::{run_pipeline, RunOptions};
use forge_core::syntax::{extract_file, tokenize_text, UnitKind, MAX_CLASS_CODE_TOKENS};
use forge_core::LanguageId;
use proptest::test_runner::{Config as PtConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn rule_filter_goldens() -> Outcome {
    let updates: [(&str, &str, FilterId); 6] = [
        ("/**\n* Lexical essentially tokenizer.\n*\n*/", "Lexical essentially tokenizer.", FilterId::StripDelimiters),
        (
            "Deletes a Mux asset\n@see https://docs.mux.com/v1/reference#deletean-asset",
            "Deletes a Mux asset",
            FilterId::StripHyperlink,
        ),
        ("isup <url> - Is it down for everyone, or just you?", "isup <url>", FilterId::HandleQuestions),
        (
            "Constructs a <code>GeneralStoresProductModel</code> from a plain JavaScript object.",
            "Constructs a GeneralStoresProductModel from a plain JavaScript object.",
            FilterId::StripHtmlTags,
        ),
        ("Pull packages data dir.\nnote: Uses su to access package's data dir.", "Pull packages data dir.", FilterId::HandleExamplesNotes),
        (
            "Set the trust level for a key in GPG keychain.\ncode-block:: bash\n    salt '*' gpg.trust-key key-id='3FAD9F1E'\n    trust-level='marginally'",
            "Set the trust level for a key in GPG keychain.\ncode-block:: bash",
            FilterId::StripEmbeddedCode,
        ),
    ];
    for (input, output, id) in updates {
        let got = apply_update_filters(input);
        ensure!(got == (output.to_string(), vec![id]), "{input:?} -> {got:?}");
    }
    let removes = [
        ("Write objects", FilterId::RemoveBadLength),
        ("Retorna uma estrutura com os argumentos passados para o programa.", FilterId::RemoveNonEnglish),
        ("<!-begin-user-doc-> <!-end-user-doc-> @generated", FilterId::RemoveAutoGen),
        ("", FilterId::RemoveEmpty),
    ];
    for (text, id) in removes {
        let got = apply_remove_filters(&tokenize_text(text), text);
        ensure!(got == Verdict::Drop(id), "{text:?} -> {got:?}");
    }
    Ok("6 update and 4 remove cases exact".into())
}

fn filter_idempotence() -> Outcome {
    let mut runner = TestRunner::new(PtConfig { cases: 10_000, failure_persistence: None, ..PtConfig::default() });
    let tags = Default::default();
    let result = runner.run(&common::docgen::docstring(), |text| {
        for id in FilterId::UPDATE_ORDER {
            let once = apply_update(id, &text, &tags);
            proptest::prop_assert_eq!(&apply_update(id, &once, &tags), &once, "{}", id);
        }
        let (once, _) = apply_update_filters(&text);
        proptest::prop_assert_eq!(&apply_update_filters(&once).0, &once);
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    Ok("10000 generated docstrings, 8 filters plus the chain".into())
}

fn extraction_fidelity() -> Outcome {
    let scan = scan_corpus(&[common::corpus_root()], &ScanOptions::new(LanguageId::ALL)).map_err(|e| e.to_string())?;
    let files: Vec<RawSourceFile> = scan.collect();
    let mut units = Vec::new();
    let mut inline = Vec::new();
    for f in &files {
        let x = extract_file(f).map_err(|e| e.to_string())?;
        for u in &x.units.units {
            ensure!(&f.content.as_bytes()[u.code_span.0..u.code_span.1] == u.code.as_bytes(), "span mismatch {}", u.key());
        }
        for s in &x.inline.samples {
            ensure!(f.content[s.comment_span.0..s.comment_span.1].contains(s.comment.as_str()), "inline span {}", s.key());
        }
        units.extend(x.units.units);
        inline.extend(x.inline.samples);
    }
    let golden = |name: &str| std::fs::read_to_string(common::fixture("golden").join(name)).unwrap_or_default();
    let jsonl = |rows: Vec<String>| rows.into_iter().map(|r| r + "\n").collect::<String>();
    ensure!(jsonl(units.iter().map(|u| serde_json::to_string(u).unwrap()).collect()) == golden("units.jsonl"), "units differ from golden");
    ensure!(jsonl(inline.iter().map(|u| serde_json::to_string(u).unwrap()).collect()) == golden("inline.jsonl"), "inline differs from golden");
    let mut per: BTreeMap<LanguageId, usize> = BTreeMap::new();
    for u in &units {
        *per.entry(u.language).or_default() += 1;
    }
    ensure!(per.len() == 10 && per.values().all(|n| *n >= 3), "units per language {per:?}");
    let find = |lang, id: &str| units.iter().find(|u| u.language == lang && u.identifier == id);
    let (class, method) = (find(LanguageId::Java, "Inventory"), find(LanguageId::Java, "receive"));
    ensure!(
        class.is_some_and(|c| c.kind == UnitKind::Class && c.docstring_raw.is_some())
            && method.is_some_and(|m| m.docstring_raw.is_some()),
        "class/method docstring pattern"
    );
    for id in ["make_registry", "Registry", "register"] {
        ensure!(find(LanguageId::Python, id).is_some(), "nested unit {id} missing");
    }
    Ok(format!("{} units, {} inline samples, {} languages", units.len(), inline.len(), per.len()))
}

fn words(n: usize) -> String {
    let mut s = (0..n - 1).map(|i| ["read", "the", "value", "from", "disk"][i % 5]).collect::<Vec<_>>().join(" ");
    s.push('.');
    s
}

fn length_bounds() -> Outcome {
    for (n, keep) in [(4, false), (5, true), (500, true), (501, false)] {
        let text = words(n);
        let tokens = tokenize_text(&text);
        ensure!(tokens.len() == n, "generator gave {} tokens", tokens.len());
        let want = if keep { Verdict::Keep } else { Verdict::Drop(FilterId::RemoveBadLength) };
        ensure!(apply_remove_filters(&tokens, &text) == want, "{n}-token docstring");
    }
    let class = |k: usize| {
        let mut s = format!("class Big:\n    table = [{}]\n", vec!["1"; 2400].join(", "));
        s.push_str(&"    pass\n".repeat(k));
        extract_file(&RawSourceFile::new("r", "big.py", LanguageId::Python, s)).unwrap().units
    };
    let base = class(0).units.iter().find(|u| u.kind == UnitKind::Class).map(|u| u.code_tokens.len()).unwrap_or(0);
    let k = MAX_CLASS_CODE_TOKENS - base;
    let at = class(k);
    let kept = at.units.iter().find(|u| u.kind == UnitKind::Class).map(|u| u.code_tokens.len());
    ensure!(kept == Some(MAX_CLASS_CODE_TOKENS), "class at limit: {kept:?}");
    let over = class(k + 1);
    ensure!(over.units.iter().all(|u| u.kind != UnitKind::Class) && over.dropped.len() == 1, "class over limit kept");
    let engine = FilterEngine::default();
    for (n, keep) in [(2, false), (3, true), (15, true), (16, false)] {
        let body = format!("def f():\n    x = 1\n    # {}\n    x += 1\n", words(n));
        let inline = extract_file(&RawSourceFile::new("r", "a.py", LanguageId::Python, body)).unwrap().inline;
        ensure!(inline.samples.len() == keep as usize, "inline comment of {n} tokens");
        if let Some(s) = inline.samples.first() {
            ensure!(engine.clean_inline(s).trace().kept(), "inline {n} dropped by clean");
        }
    }
    Ok("docstring 4/5/500/501, class 5000/5001, inline 2/3/15/16".into())
}

fn minhash_accuracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut err = 0.0;
    for _ in 0..1000 {
        let len = rng.gen_range(10..300);
        let a = common::random_tokens(&mut rng, len, 3000);
        let p: f64 = rng.gen_range(0.0..0.5);
        let b: Vec<String> =
            a.iter().map(|t| if rng.gen_bool(p) { format!("x{}", rng.gen_range(0..3000)) } else { t.clone() }).collect();
        let est = minhash_signature(&a, 256, 5, 7).agreement(&minhash_signature(&b, 256, 5, 7));
        err += (est - exact_jaccard(&a, &b, 5)).abs();
    }
    let mean = err / 1000.0;
    ensure!(mean <= 0.05, "mean |agreement - jaccard| = {mean:.4}");
    let (corpus, holdout, planted) = common::planted_corpus(20);
    let found: BTreeSet<String> = dedup_against(&corpus, &holdout, &DedupConfig::default(), 3)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|m| m.corpus_key)
        .collect();
    let recall = planted.intersection(&found).count();
    ensure!(recall == 20, "planted recall {recall}/20");
    Ok(format!("mean abs error {mean:.4}, recall {recall}/20, {} false positives", found.len() - recall))
}

fn split_contracts() -> Outcome {
    let samples = common::split_corpus(10_000, 300, 77);
    let cfg = SplitConfig::default();
    let m = assign_splits(&samples, &cfg, 5).map_err(|e| e.to_string())?;
    let mut repo_split: BTreeMap<&str, Split> = BTreeMap::new();
    let mut violations = 0;
    for a in m.assignments.values() {
        if *repo_split.entry(&a.repo).or_insert(a.split) != a.split {
            violations += 1;
        }
    }
    ensure!(violations == 0, "{violations} repo-disjointness violations");
    let all: Vec<usize> = samples.iter().map(|s| s.code_len).collect();
    let mut worst_ks: f64 = 0.0;
    for (i, split) in Split::ASSIGNABLE.into_iter().enumerate() {
        let part: Vec<usize> =
            samples.iter().filter(|s| m.assignments[&s.key].split == split).map(|s| s.code_len).collect();
        let frac = part.len() as f64 / samples.len() as f64;
        ensure!((frac - cfg.ratios[i]).abs() <= 0.01, "{split:?} fraction {frac:.4}");
        let ks = ks_distance(&part, &all);
        ensure!(ks <= 0.1, "{split:?} KS {ks:.4}");
        worst_ks = worst_ks.max(ks);
    }
    for (key, a) in &m.assignments {
        let small = a.subsets.iter().any(|s| s == "small");
        let medium = a.subsets.iter().any(|s| s == "medium");
        ensure!(!small || medium, "{key} in small but not medium");
        ensure!(!medium || a.split == Split::Train, "{key} in medium but not train");
    }
    let again = assign_splits(&samples, &cfg, 5).map_err(|e| e.to_string())?;
    ensure!(again == m, "same seed gave a different manifest");
    Ok(format!("counts {:?}, worst KS {worst_ks:.4}, {} swaps", m.diagnostics.counts, m.diagnostics.swaps))
}

fn brute_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut num2, mut pairs) = (0u64, 0u64);
    for (i, li) in labels.iter().enumerate() {
        for (j, lj) in labels.iter().enumerate() {
            if *li == 1 && *lj == 0 {
                pairs += 1;
                num2 += if scores[i] > scores[j] { 2 } else if scores[i] == scores[j] { 1 } else { 0 };
            }
        }
    }
    num2 as f64 / (2 * pairs) as f64
}

fn gate_quality() -> Outcome {
    let naturals = common::synthetic_pairs(5000, 2024);
    let labeled = generate_negatives(&naturals, 7, 1.0);
    ensure!(labeled.len() == 10_000, "{} labeled pairs", labeled.len());
    let refs: Vec<PairRef> =
        labeled.iter().map(|p| PairRef { code: &p.code, docstring: &p.docstring, language: p.language }).collect();
    let scores = BaselineScorer.score_batch(&refs).map_err(|e| e.to_string())?;
    let labels: Vec<u8> = labeled.iter().map(|p| p.label).collect();
    let auc = evaluate_auc(&scores, &labels).map_err(|e| e.to_string())?;
    ensure!(auc >= 0.70, "AUC {auc:.4}");
    let by_key: std::collections::HashMap<String, f64> =
        labeled.iter().zip(&scores).map(|(p, s)| (p.key(), *s)).collect();
    let negatives: Vec<String> = labeled.iter().filter(|p| p.label == 0).map(|p| p.key()).collect();
    let n_neg = negatives.len();
    let outcome = gate(negatives, |k| k.clone(), &by_key, 0.5).map_err(|e| e.to_string())?;
    let dropped = outcome.dropped.len() as f64 / n_neg as f64;
    ensure!(dropped >= 0.70, "gate dropped {:.1}% of negatives", dropped * 100.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let idx: Vec<usize> = (0..200).map(|_| rng.gen_range(0..labeled.len())).collect();
        let (s, l): (Vec<f64>, Vec<u8>) = idx.iter().map(|i| (scores[*i], labels[*i])).unzip();
        if l.iter().all(|x| *x == l[0]) {
            continue;
        }
        let fast = evaluate_auc(&s, &l).map_err(|e| e.to_string())?;
        ensure!(fast == brute_auc(&s, &l), "AUC {fast} differs from brute force {}", brute_auc(&s, &l));
    }
    Ok(format!("AUC {auc:.4}, {:.1}% of negatives dropped, 200-sample AUC exact", dropped * 100.0))
}

fn read_tree(dir: &Path) -> BTreeMap<std::path::PathBuf, Vec<u8>> {
    walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .map(|e| (e.path().strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(e.path()).unwrap()))
        .collect()
}

fn pipeline_accounting() -> Outcome {
    let (a, b) = (tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?);
    let cfg = |out: &Path| PipelineConfig { roots: vec![common::corpus_root()], out: out.to_path_buf(), seed: 1, ..Default::default() };
    let m = run_pipeline(&cfg(a.path()), &RunOptions::default()).map_err(|e| e.to_string())?;
    for s in &m.stages {
        for l in &s.ledgers {
            ensure!(l.balanced(), "{:?}/{}: {} != {} + {:?}", s.stage, l.name, l.input, l.output, l.dropped);
        }
    }
    let flow = m.pairs.ok_or("no pair flow")?;
    ensure!(flow.balanced(), "pair flow {flow:?}");
    run_pipeline(&cfg(b.path()), &RunOptions::default()).map_err(|e| e.to_string())?;
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    ensure!(ta.keys().eq(tb.keys()), "file sets differ");
    for (k, v) in &ta {
        ensure!(v == &tb[k], "{} differs between runs", k.display());
    }
    Ok(format!(
        "{} ledgers balanced, pairs {} -> {}, {} files identical",
        m.stages.iter().map(|s| s.ledgers.len()).sum::<usize>(),
        flow.pairs_in,
        flow.pairs_out,
        ta.len()
    ))
}

struct Criterion {
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { name: "rule-filter golden suite", limit: Some(Duration::from_secs(1)), run: rule_filter_goldens },
        Criterion { name: "filter idempotence (10k)", limit: Some(Duration::from_secs(30)), run: filter_idempotence },
        Criterion { name: "extraction fidelity", limit: None, run: extraction_fidelity },
        Criterion { name: "length bounds", limit: None, run: length_bounds },
        Criterion { name: "minhash accuracy", limit: Some(Duration::from_secs(60)), run: minhash_accuracy },
        Criterion { name: "split contracts", limit: Some(Duration::from_secs(60)), run: split_contracts },
        Criterion { name: "baseline gate quality", limit: None, run: gate_quality },
        Criterion { name: "pipeline accounting", limit: None, run: pipeline_accounting },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    println!();
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let took = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if took > limit => Err(format!("took {took:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        match &outcome {
            Ok(detail) => println!("PASS  {:<28} {:>9.2?}  {detail}", c.name, took),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:<28} {:>9.2?}  {why}", c.name, took);
            }
        }
    }
    println!("\nacceptance: {} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
