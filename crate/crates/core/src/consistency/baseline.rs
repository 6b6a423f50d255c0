//! Lexical baseline scorer.
//!
//! Both texts are reduced to sets of lowercase word pieces (identifiers are
//! split on camelCase and snake_case). With `D` the docstring set and `C` the
//! code set, the score is `|D ∩ C| / (|D| + |C \ D| / |C|)`: it is 0 without
//! overlap, 1 when the sets are equal, and penalises unmatched code terms
//! only lightly.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;

static WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[A-Za-z0-9]+").unwrap());

const STOPWORDS: &[&str] = &[
    "a", "an", "the", "of", "to", "in", "for", "and", "or", "is", "are", "be", "been", "this", "that", "these",
    "those", "it", "its", "with", "as", "on", "by", "from", "at", "if", "into", "than", "then", "when", "which",
    "whether", "will", "would", "should", "can", "may", "must", "not", "no", "all", "any", "each", "some", "such",
    "only", "also", "other", "we", "you", "our", "your", "their", "there", "here", "has", "have", "was", "were",
    "do", "does", "return", "given", "specified", "provided", "used", "use", "uses", "using", "new", "e", "g", "i",
];

const KEYWORDS: &[&str] = &[
    "def", "return", "if", "else", "elif", "for", "while", "function", "var", "let", "const", "public", "private",
    "protected", "static", "void", "int", "class", "new", "this", "self", "null", "none", "nil", "true", "false",
    "import", "fn", "func", "pub", "mut", "end", "do", "then", "try", "catch", "except", "raise", "throw",
    "throws", "in", "of", "and", "or", "not", "is", "as", "string", "bool", "boolean", "char", "long", "double",
    "float", "final", "override", "async", "await", "yield", "lambda", "pass", "break", "continue", "switch", "case",
    "default", "struct", "impl", "use", "package", "namespace", "using", "unsigned", "signed", "auto", "echo",
    "array", "begin", "rescue", "ensure", "unless", "match", "go", "defer", "type", "interface", "extends",
    "implements", "virtual", "template", "typename", "std", "ref", "out", "params", "object", "instanceof", "typeof",
];

/// Splits `fooBarBaz`, `foo_bar`, `HTTPServer` into lowercase pieces.
pub fn split_identifier(word: &str) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let mut parts = Vec::new();
    let mut cur = String::new();
    for i in 0..chars.len() {
        let c = chars[i];
        if !c.is_ascii_alphanumeric() {
            if !cur.is_empty() {
                parts.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if !cur.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_ascii_lowercase());
            let boundary = (prev.is_ascii_lowercase() && c.is_ascii_uppercase())
                || (prev.is_ascii_uppercase() && c.is_ascii_uppercase() && next_lower)
                || (prev.is_ascii_alphabetic() && c.is_ascii_digit())
                || (prev.is_ascii_digit() && c.is_ascii_alphabetic());
            if boundary {
                parts.push(std::mem::take(&mut cur));
            }
        }
        cur.push(c.to_ascii_lowercase());
    }
    if !cur.is_empty() {
        parts.push(cur);
    }
    parts
}

/// Light plural folding: `numbers` → `number`, `classes` stays.
fn fold(word: &str) -> String {
    if word.len() > 3 && word.ends_with('s') && !word.ends_with("ss") {
        word[..word.len() - 1].to_string()
    } else {
        word.to_string()
    }
}

fn pieces(text: &str) -> Vec<String> {
    WORD.find_iter(text).flat_map(|m| split_identifier(m.as_str())).map(|w| fold(&w)).collect()
}

/// Term set with stop words and keywords removed; the same rule applies to
/// both sides so identical texts get identical sets.
pub fn terms(text: &str) -> BTreeSet<String> {
    let all = pieces(text);
    let kept: BTreeSet<String> =
        all.iter().filter(|w| !STOPWORDS.contains(&w.as_str()) && !KEYWORDS.contains(&w.as_str())).cloned().collect();
    if kept.is_empty() {
        all.into_iter().collect()
    } else {
        kept
    }
}

/// Smoothed overlap of two term sets, in `[0, 1]`.
pub fn overlap_score(doc: &BTreeSet<String>, code: &BTreeSet<String>) -> f64 {
    if doc.is_empty() || code.is_empty() {
        return 0.0;
    }
    let inter = doc.intersection(code).count() as f64;
    let code_only = code.difference(doc).count() as f64;
    inter / (doc.len() as f64 + code_only / code.len() as f64)
}

pub fn baseline_score(code: &str, docstring: &str) -> f64 {
    overlap_score(&terms(docstring), &terms(code))
}
