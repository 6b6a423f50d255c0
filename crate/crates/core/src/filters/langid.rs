//! Character-trigram language identification.
//!
//! A naive Bayes model over letter trigrams trained on short technical
//! sentences in a handful of languages. Only the probability of English is
//! exposed; non-Latin scripts are treated as non-English outright.

use std::collections::HashMap;
use std::sync::LazyLock;

const PROFILES: &[(&str, &str)] = &[
    ("en", include_str!("../../config/langid/en.txt")),
    ("pt", include_str!("../../config/langid/pt.txt")),
    ("es", include_str!("../../config/langid/es.txt")),
    ("fr", include_str!("../../config/langid/fr.txt")),
    ("de", include_str!("../../config/langid/de.txt")),
    ("it", include_str!("../../config/langid/it.txt")),
    ("nl", include_str!("../../config/langid/nl.txt")),
    ("id", include_str!("../../config/langid/id.txt")),
    ("vi", include_str!("../../config/langid/vi.txt")),
];

const SMOOTHING: f64 = 0.5;

struct Profile {
    name: &'static str,
    counts: HashMap<[char; 3], u32>,
    total: u32,
}

struct Model {
    profiles: Vec<Profile>,
    vocab: usize,
}

static MODEL: LazyLock<Model> = LazyLock::new(|| {
    let profiles: Vec<Profile> = PROFILES
        .iter()
        .map(|(name, text)| {
            let mut counts = HashMap::new();
            let mut total = 0;
            for t in trigrams(text) {
                *counts.entry(t).or_insert(0) += 1;
                total += 1;
            }
            Profile { name, counts, total }
        })
        .collect();
    let mut all: Vec<[char; 3]> = profiles.iter().flat_map(|p| p.counts.keys().copied()).collect();
    all.sort_unstable();
    all.dedup();
    Model { vocab: all.len() + 1, profiles }
});

fn is_latin(c: char) -> bool {
    c.is_ascii_alphabetic() || ('\u{00C0}'..='\u{024F}').contains(&c) || ('\u{1E00}'..='\u{1EFF}').contains(&c)
}

/// Letter trigrams of the lowercased text with words padded by one space.
fn trigrams(text: &str) -> Vec<[char; 3]> {
    let mut out = Vec::new();
    for word in text.split(|c: char| !c.is_alphabetic()).filter(|w| !w.is_empty()) {
        let chars: Vec<char> = std::iter::once(' ')
            .chain(word.chars().flat_map(char::to_lowercase))
            .chain(std::iter::once(' '))
            .collect();
        out.extend(chars.windows(3).map(|w| [w[0], w[1], w[2]]));
    }
    out
}

/// Number of alphabetic characters in `text`.
pub fn letter_count(text: &str) -> usize {
    text.chars().filter(|c| c.is_alphabetic()).count()
}

/// Posterior probability per profile, in profile order.
pub fn language_posteriors(text: &str) -> Vec<(&'static str, f64)> {
    let model = &*MODEL;
    let grams = trigrams(text);
    let logs: Vec<f64> = model
        .profiles
        .iter()
        .map(|p| {
            let denom = (p.total as f64 + SMOOTHING * model.vocab as f64).ln();
            grams
                .iter()
                .map(|g| (p.counts.get(g).copied().unwrap_or(0) as f64 + SMOOTHING).ln() - denom)
                .sum()
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = logs.iter().map(|l| (l - max).exp()).sum();
    model.profiles.iter().zip(&logs).map(|(p, l)| (p.name, (l - max).exp() / z)).collect()
}

/// Probability that `text` is English. Mostly non-Latin text scores 0.0;
/// otherwise texts with fewer than `min_letters` letters score 1.0.
pub fn english_probability(text: &str, min_letters: usize) -> f64 {
    let letters: Vec<char> = text.chars().filter(|c| c.is_alphabetic()).collect();
    let latin = letters.iter().filter(|c| is_latin(**c)).count();
    if latin * 2 < letters.len() {
        return 0.0;
    }
    if letters.len() < min_letters {
        return 1.0;
    }
    language_posteriors(text).into_iter().find(|(n, _)| *n == "en").map_or(0.0, |(_, p)| p)
}

/// Most probable profile name, or `None` when the text is too short to judge.
pub fn detect(text: &str, min_letters: usize) -> Option<&'static str> {
    if letter_count(text) < min_letters {
        return None;
    }
    language_posteriors(text)
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(n, _)| n)
}
