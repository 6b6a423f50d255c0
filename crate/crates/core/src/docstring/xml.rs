//! C# XML documentation comments.

use std::sync::LazyLock;

use regex::Regex;

use super::{Builder, DocstringMetadata, StyleId};

static ELEMENT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?s)<(\w+)((?:\s+\w+\s*=\s*"[^"]*")*)\s*>(.*?)</(\w+)\s*>"#).unwrap());
static NAME_ATTR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r#"\b(?:name|cref)\s*=\s*"([^"]*)""#).unwrap());
static SELF_CLOSING_REF: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"<(?:see|seealso|paramref|typeparamref)\s+(?:cref|name|langword)\s*=\s*"([^"]*)"\s*/>"#).unwrap());
static INNER_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"</?\w+[^<>]*>").unwrap());

const TOP_LEVEL: &[&str] = &["summary", "param", "returns", "exception", "remarks", "typeparam", "value", "example"];

fn inner_text(s: &str) -> String {
    let s = SELF_CLOSING_REF.replace_all(s, "$1");
    let s = INNER_TAG.replace_all(&s, "");
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn balanced(text: &str, tag: &str) -> bool {
    let open = Regex::new(&format!(r"<{tag}(\s[^<>]*)?>")).unwrap().find_iter(text).count();
    let close = text.matches(&format!("</{tag}>")).count();
    open == close
}

pub fn matches(text: &str) -> bool {
    text.contains("<summary>")
        && text.contains("</summary>")
        && TOP_LEVEL.iter().all(|t| balanced(text, t))
        && ELEMENT.captures_iter(text).all(|c| {
            c[1] == c[4]
                && match &c[1] {
                    "param" | "typeparam" | "exception" => NAME_ATTR.is_match(&c[2]),
                    _ => true,
                }
        })
}

pub fn parse(text: &str) -> DocstringMetadata {
    let mut b = Builder::default();
    let mut rest = String::new();
    let mut last = 0;
    for c in ELEMENT.captures_iter(text) {
        let m = c.get(0).unwrap();
        rest.push_str(&text[last..m.start()]);
        last = m.end();
        let tag = &c[1];
        let attr = NAME_ATTR.captures(&c[2]).map(|a| a.get(1).unwrap().as_str());
        let body = inner_text(&c[3]);
        if c[1] != c[4] {
            b.unparsed(m.as_str());
            continue;
        }
        match (tag, attr) {
            ("summary", _) => b.description.push(body),
            ("param", Some(name)) => b.param(name, None, &body),
            ("returns", _) => b.returns(None, &body),
            ("exception", Some(cref)) => b.raise(cref, &body),
            ("param" | "exception", None) => b.unparsed(m.as_str()),
            (other, Some(name)) => b.other(other, &format!("{name}: {body}")),
            (other, None) => b.other(other, &body),
        }
    }
    rest.push_str(&text[last..]);
    if !rest.trim().is_empty() {
        b.unparsed(&inner_text(&rest));
    }
    b.finish(StyleId::XmlDoc)
}
