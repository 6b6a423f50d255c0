mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;

use forge_core::ingest::{scan_corpus, RawSourceFile, ScanOptions};
use forge_core::syntax::{extract_file, tokenize_code, tokenize_text, ExtractedUnit, InlineSample, UnitKind};
use forge_core::LanguageId;

const UPDATE_ENV: &str = "FORGE_UPDATE_GOLDENS";

fn corpus_files() -> Vec<RawSourceFile> {
    let scan = scan_corpus(&[common::corpus_root()], &ScanOptions::new(LanguageId::ALL)).unwrap();
    scan.collect()
}

fn extract_all() -> (Vec<RawSourceFile>, Vec<ExtractedUnit>, Vec<InlineSample>) {
    let files = corpus_files();
    let mut units = Vec::new();
    let mut inline = Vec::new();
    for f in &files {
        let x = extract_file(f).unwrap();
        assert!(x.units.dropped.is_empty(), "{}: {:?}", f.rel_path, x.units.dropped);
        units.extend(x.units.units);
        inline.extend(x.inline.samples);
    }
    (files, units, inline)
}

fn to_jsonl<T: serde::Serialize>(rows: &[T]) -> String {
    rows.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
}

fn check_golden(name: &str, actual: &str) {
    let path: PathBuf = common::fixture("golden").join(name);
    if std::env::var_os(UPDATE_ENV).is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    if expected != actual {
        for (i, (e, a)) in expected.lines().zip(actual.lines()).enumerate() {
            assert_eq!(e, a, "{name} line {}", i + 1);
        }
        assert_eq!(expected.lines().count(), actual.lines().count(), "{name} line count");
    }
}

#[test]
fn extracted_units_match_goldens() {
    let (_, units, inline) = extract_all();
    check_golden("units.jsonl", &to_jsonl(&units));
    check_golden("inline.jsonl", &to_jsonl(&inline));
}

#[test]
fn span_fidelity_for_every_record() {
    let (files, units, inline) = extract_all();
    let by_path: BTreeMap<(&str, &str), &RawSourceFile> =
        files.iter().map(|f| ((f.repo_id.as_str(), f.rel_path.as_str()), f)).collect();
    for u in &units {
        let f = by_path[&(u.repo_id.as_str(), u.rel_path.as_str())];
        assert_eq!(&f.content.as_bytes()[u.code_span.0..u.code_span.1], u.code.as_bytes(), "{}", u.key());
        assert!(!u.identifier.is_empty());
        if let Some(doc) = &u.docstring_raw {
            assert!(f.content.contains(doc.as_str()), "{}", u.key());
        }
    }
    for s in &inline {
        let f = by_path[&(s.repo_id.as_str(), s.rel_path.as_str())];
        assert!(f.content.contains(&s.prev_context) && f.content.contains(&s.next_context), "{}", s.key());
        assert!(!(s.prev_context.is_empty() && s.next_context.is_empty()));
        assert!((3..=15).contains(&s.comment_tokens.len()), "{}", s.key());
    }
}

#[test]
fn every_language_has_three_units() {
    let (_, units, _) = extract_all();
    let mut per: BTreeMap<LanguageId, usize> = BTreeMap::new();
    for u in &units {
        *per.entry(u.language).or_default() += 1;
    }
    assert_eq!(per.len(), 10, "{per:?}");
    assert!(per.values().all(|n| *n >= 3), "{per:?}");
    // C and Go have no class units.
    assert!(units
        .iter()
        .filter(|u| matches!(u.language, LanguageId::C | LanguageId::Go))
        .all(|u| u.kind == UnitKind::Function));
}

#[test]
fn class_and_member_function_each_carry_their_docstring() {
    let (_, units, _) = extract_all();
    let find = |lang: LanguageId, id: &str| units.iter().find(|u| u.language == lang && u.identifier == id).unwrap();
    for (lang, class, method, class_doc, method_doc) in [
        (LanguageId::Java, "Inventory", "receive", "Keeps track of stock", "Adds units of a product"),
        (LanguageId::Cpp, "Matrix", "at", "Dense row-major matrix", "Return the element stored"),
        (LanguageId::Php, "Cart", "add", "Shopping cart", "Add a product to the cart"),
        (LanguageId::Python, "Circle", "area", "A circle described", "Compute the area"),
        (LanguageId::Ruby, "Slugger", "slug", "Turns arbitrary titles", "Convert a title"),
    ] {
        let c = find(lang, class);
        let m = find(lang, method);
        assert_eq!(c.kind, UnitKind::Class);
        assert_eq!(m.kind, UnitKind::Function);
        assert!(c.docstring_raw.as_deref().unwrap().contains(class_doc), "{lang} class");
        assert!(m.docstring_raw.as_deref().unwrap().contains(method_doc), "{lang} method");
        assert!(!c.docstring_raw.as_deref().unwrap().contains(method_doc), "{lang}: method doc leaked to class");
    }
}

#[test]
fn nested_function_class_function_all_emitted() {
    let (_, units, _) = extract_all();
    for (lang, outer, class, inner) in
        [(LanguageId::Python, "make_registry", "Registry", "register"), (LanguageId::JavaScript, "themedFactory", "Themed", "render")]
    {
        let get = |id: &str| units.iter().find(|u| u.language == lang && u.identifier == id).unwrap();
        let (o, c, i) = (get(outer), get(class), get(inner));
        assert!(o.code_span.0 < c.code_span.0 && c.code_span.1 <= o.code_span.1);
        assert!(c.code_span.0 < i.code_span.0 && i.code_span.1 <= c.code_span.1);
        assert_eq!(c.kind, UnitKind::Class);
    }
}

#[test]
fn undocumented_units_have_no_docstring() {
    let (_, units, _) = extract_all();
    for id in ["perimeter", "level", "cart_size", "ringbuf_len", "trace_of", "Count", "Len", "shout", "helper", "noop"] {
        let u = units.iter().find(|u| u.identifier == id).unwrap_or_else(|| panic!("{id}"));
        assert!(u.docstring_raw.is_none(), "{id}");
        assert!(u.docstring_tokens.is_none(), "{id}");
    }
}

#[test]
fn inline_comment_with_context() {
    let f = RawSourceFile::new("r", "a.py", LanguageId::Python, "def f():\n    x=1\n    # add one to x\n    x+=1\n".into());
    let s = extract_file(&f).unwrap().inline.samples;
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].comment, "add one to x");
    assert_eq!(s[0].prev_context, "x=1");
    assert_eq!(s[0].next_context, "x+=1");
    let f = RawSourceFile::new("r", "a.py", LanguageId::Python, "def f():\n    # set up the counter\n    x=1\n".into());
    let s = extract_file(&f).unwrap().inline.samples;
    assert_eq!(s[0].prev_context, "");
    assert_eq!(s[0].next_context, "x=1");
}

#[test]
fn tokenizer_examples() {
    assert_eq!(tokenize_code("pass", LanguageId::Python).tokens, ["pass"]);
    assert_eq!(tokenize_code("x = 1 + 2", LanguageId::Python).tokens, ["x", "=", "1", "+", "2"]);
    assert!(tokenize_code("", LanguageId::Python).tokens.is_empty());
    assert_eq!(tokenize_text("Returns the sum."), ["Returns", "the", "sum", "."]);
    assert_eq!(
        tokenize_text("e.g., a URL: http://x"),
        ["e", ".", "g", ".", ",", "a", "URL", ":", "http", ":", "/", "/", "x"]
    );
}
