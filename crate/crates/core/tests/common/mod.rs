//! Generators shared by the integration suites.
#![allow(dead_code)]

use std::path::PathBuf;

use forge_core::consistency::NaturalPair;
use forge_core::dedup::SplitSample;
use forge_core::LanguageId;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn corpus_root() -> PathBuf {
    fixture("corpus")
}

const VERBS: &[&str] = &[
    "compute", "parse", "load", "save", "render", "validate", "merge", "split", "encode", "decode", "fetch",
    "update", "delete", "insert", "sort", "filter", "format", "build", "resolve", "register", "connect", "close",
    "flush", "hash", "sign", "verify", "compress", "normalize", "schedule", "cancel",
];
const NOUNS: &[&str] = &[
    "user", "order", "invoice", "token", "buffer", "matrix", "header", "payload", "session", "config", "cache",
    "record", "account", "message", "queue", "vector", "image", "string", "packet", "ledger", "profile",
    "timestamp", "checksum", "template", "cursor", "socket", "channel", "widget", "layer", "batch", "route",
    "schema", "index", "column", "table", "graph", "node", "edge", "path", "file",
];
const FILLER: &[&str] = &["the", "a", "given", "current", "new", "each", "all", "this"];

fn camel(words: &[&str]) -> String {
    let mut s = words[0].to_string();
    for w in &words[1..] {
        let mut c = w.chars();
        s.push(c.next().unwrap().to_ascii_uppercase());
        s.push_str(c.as_str());
    }
    s
}

/// Natural pairs whose docstring is derived from the function identifier.
pub fn synthetic_pairs(n: usize, seed: u64) -> Vec<NaturalPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let langs = LanguageId::ALL;
    (0..n)
        .map(|i| {
            let verb = *VERBS.choose(&mut rng).unwrap();
            let k = rng.gen_range(1..=2);
            let nouns: Vec<&str> = NOUNS.choose_multiple(&mut rng, k).copied().collect();
            let mut words = vec![verb];
            words.extend(&nouns);
            let lang = langs[i % langs.len()];
            let arg = *NOUNS.choose(&mut rng).unwrap();
            let name = match lang {
                LanguageId::Python | LanguageId::Ruby | LanguageId::Rust | LanguageId::C | LanguageId::Php => words.join("_"),
                _ => camel(&words),
            };
            let code = match lang {
                LanguageId::Python => format!("def {name}({arg}):\n    return {arg}.value\n"),
                LanguageId::Ruby => format!("def {name}({arg})\n  {arg}.value\nend\n"),
                LanguageId::Rust => format!("fn {name}({arg}: &Item) -> u32 {{\n    {arg}.value\n}}\n"),
                LanguageId::Go => format!("func {name}({arg} *Item) int {{\n\treturn {arg}.Value\n}}\n"),
                LanguageId::Php => format!("function {name}(${arg}) {{\n    return ${arg}->value;\n}}\n"),
                LanguageId::JavaScript => format!("function {name}({arg}) {{\n  return {arg}.value;\n}}\n"),
                _ => format!("int {name}(Item {arg}) {{\n    return {arg}.value;\n}}\n"),
            };
            let filler = *FILLER.choose(&mut rng).unwrap();
            let mut doc = vec![capitalize(verb), filler.to_string()];
            doc.extend(nouns.iter().map(|n| n.to_string()));
            let docstring = format!("{}.", doc.join(" "));
            NaturalPair { key: format!("repo{}/f{i}", i % 97), code, docstring, language: lang }
        })
        .collect()
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next().map(|f| f.to_ascii_uppercase().to_string() + c.as_str()).unwrap_or_default()
}

/// `n` samples over `repos` repositories of uneven size; each repository
/// has its own typical code length.
pub fn split_corpus(n: usize, repos: usize, seed: u64) -> Vec<SplitSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..repos).map(|_| rng.gen_range(0.2f64..1.0).powi(3)).collect();
    let total_w: f64 = weights.iter().sum();
    let mut sizes: Vec<usize> = weights.iter().map(|w| ((w / total_w) * n as f64).floor().max(1.0) as usize).collect();
    let mut assigned: usize = sizes.iter().sum();
    while assigned < n {
        let i = rng.gen_range(0..repos);
        sizes[i] += 1;
        assigned += 1;
    }
    while assigned > n {
        let i = rng.gen_range(0..repos);
        if sizes[i] > 1 {
            sizes[i] -= 1;
            assigned -= 1;
        }
    }
    let mut out = Vec::with_capacity(n);
    for (r, size) in sizes.iter().enumerate() {
        let centre: f64 = rng.gen_range(2.5f64..5.5);
        for j in 0..*size {
            let len = (centre + rng.gen_range(-1.0f64..1.0)).exp().round() as usize;
            out.push(SplitSample { key: format!("repo{r:03}/s{j}"), repo: format!("repo{r:03}"), code_len: len });
        }
    }
    out
}

pub fn random_tokens(rng: &mut impl Rng, len: usize, vocab: usize) -> Vec<String> {
    (0..len).map(|_| format!("t{}", rng.gen_range(0..vocab))).collect()
}

pub mod docgen {
    use proptest::prelude::*;

    const SENTENCES: &[&str] = &[
        "Returns the sum of both input values.",
        "Set the trust level for a key in GPG keychain.",
        "Deletes a Mux asset",
        "Compute the checksum of the payload",
        "Parse a header line into fields.",
        "isup <url>",
        "Lexical essentially tokenizer.",
        "Recursive filter design using a least-squares method.",
    ];
    const NOISE: &[&str] = &[
        "/**",
        "*/",
        " * ",
        "///",
        "#",
        "\"\"\"",
        "@see https://docs.mux.com/v1/reference#deletean-asset",
        "See http://example.org/a?b=c for details.",
        "<code>Matrix</code>",
        "<p>",
        "</p>",
        "<br/>",
        "&lt;T&gt;",
        "code-block:: bash",
        "    salt '*' gpg.trust-key key-id='3FAD9F1E'",
        ">>> f(1)",
        "$$\\sqrt{x^2 + y^2}$$",
        "\\mathbf{A} = \\exp(x)",
        "[B,A] = YULEWALK(N,F,M) finds the N-th order",
        "@since 1.2",
        "@memberOf _",
        "{@link Foo#bar}",
        "Example:",
        "note: Uses su to access package's data dir.",
        "Why is this needed?",
        "- Is it down for everyone, or just you?",
        "Args:",
        "    x: the value",
        "",
        "   ",
        "?",
        "*",
        "\t",
    ];

    fn fragment() -> impl Strategy<Value = String> {
        prop_oneof![
            3 => proptest::sample::select(SENTENCES).prop_map(str::to_string),
            4 => proptest::sample::select(NOISE).prop_map(str::to_string),
            1 => "[ -~]{0,30}",
            1 => "[a-zA-Z?.:<>/*@# ]{0,20}",
        ]
    }

    /// Docstring-like text mixing clean sentences with filter-triggering noise.
    pub fn docstring() -> impl Strategy<Value = String> {
        (proptest::collection::vec((fragment(), proptest::sample::select(&["\n", " ", "\n\n", "\n  "][..])), 0..10))
            .prop_map(|parts| parts.into_iter().map(|(f, sep)| f + sep).collect())
    }
}

/// 40 holdout samples and a 520-sample corpus holding near-copies of 20 of
/// them (one token renamed); returns the planted corpus keys.
pub fn planted_corpus(
    seed: u64,
) -> (Vec<forge_core::dedup::HoldoutRecord>, Vec<forge_core::dedup::HoldoutRecord>, std::collections::BTreeSet<String>) {
    use forge_core::dedup::HoldoutRecord;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let holdout: Vec<HoldoutRecord> = (0..40)
        .map(|i| HoldoutRecord { key: format!("bench/{i}"), code_tokens: random_tokens(&mut rng, 150, 2000) })
        .collect();
    let mut corpus: Vec<HoldoutRecord> = (0..500)
        .map(|i| HoldoutRecord { key: format!("corpus/{i}"), code_tokens: random_tokens(&mut rng, 150, 2000) })
        .collect();
    let mut planted = std::collections::BTreeSet::new();
    for i in 0..20 {
        let mut toks = holdout[i * 2].code_tokens.clone();
        let at = rng.gen_range(0..toks.len());
        toks[at] = "renamed".into();
        let key = format!("corpus/copy{i}");
        planted.insert(key.clone());
        corpus.push(HoldoutRecord { key, code_tokens: toks });
    }
    (corpus, holdout, planted)
}
