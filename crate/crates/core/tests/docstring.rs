use forge_core::docstring::{detect_style, parse_metadata, short_docstring, StyleId};
use forge_core::LanguageId;
use proptest::prelude::*;
use serde::Deserialize;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[derive(Deserialize)]
struct ShortCase {
    description: String,
    expected: String,
}

#[derive(Deserialize)]
struct Styled {
    language: LanguageId,
    style: String,
    docstring: String,
}

#[test]
fn short_docstring_agrees_with_hand_labels() {
    let cases: Vec<ShortCase> = fixture("short_docstrings.jsonl").lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(cases.len(), 50);
    let misses: Vec<(&str, String, &str)> = cases
        .iter()
        .map(|c| (c.description.as_str(), short_docstring(&c.description), c.expected.as_str()))
        .filter(|(_, got, want)| got != want)
        .collect();
    for m in &misses {
        println!("disagreement: {m:?}");
    }
    // The rule cannot tell "Dr. Smith" from a sentence break.
    assert!(misses.len() <= 1, "{misses:?}");
}

#[test]
fn styled_corpus() {
    let docs: Vec<Styled> = fixture("styled_docstrings.jsonl").lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let mut styled = 0;
    let mut in_range = 0;
    for d in &docs {
        let style = detect_style(&d.docstring, d.language);
        assert_eq!(style.as_str(), d.style, "{:?}", d.docstring);
        let meta = parse_metadata(&d.docstring, style);
        assert!(!meta.other_tags.contains_key("unparsed"), "{:?} -> {:?}", d.docstring, meta.other_tags);
        for p in &meta.params {
            assert!(d.docstring.contains(&p.name), "fabricated {}", p.name);
        }
        if style != StyleId::Unstyled {
            styled += 1;
            if (1..=5).contains(&meta.attribute_count()) {
                in_range += 1;
            }
        }
    }
    assert!(styled >= 25);
    assert!(in_range as f64 >= 0.6 * styled as f64, "{in_range}/{styled}");
}

fn any_language() -> impl Strategy<Value = LanguageId> {
    prop::sample::select(LanguageId::ALL.to_vec())
}

fn docstringish() -> impl Strategy<Value = String> {
    let piece = prop::sample::select(vec![
        "Args:", "Returns:", "    x (int): a", "Parameters", "----------", "x : int", ":param x: y", "@param x y",
        "@return z", "@param {T} x", "@param int $x", "\\brief b", "<summary>s</summary>", "@param [T] x",
        "+x+:: y", "text.", "", "    indented", "@bogus", ":returns: r",
    ]);
    prop::collection::vec(piece, 0..12).prop_map(|v| v.join("\n"))
}

proptest! {
    #[test]
    fn no_fabricated_params(doc in docstringish(), lang in any_language()) {
        let m = parse_metadata(&doc, detect_style(&doc, lang));
        for p in &m.params {
            prop_assert!(doc.contains(&p.name));
        }
    }

    #[test]
    fn deterministic(doc in docstringish(), lang in any_language()) {
        let a = parse_metadata(&doc, detect_style(&doc, lang));
        let b = parse_metadata(&doc, detect_style(&doc, lang));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn short_docstring_is_prefix(s in "\\PC{0,80}") {
        let short = short_docstring(&s);
        prop_assert!(s.trim().starts_with(&short));
    }
}
