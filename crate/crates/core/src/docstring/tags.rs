//! Block-tag styles: Javadoc, JSDoc, PHPDoc, Doxygen and YARD, plus RDoc.

use std::sync::LazyLock;

use regex::Regex;

use super::{indent_of, Builder, DocstringMetadata, StyleId};

fn re(p: &str) -> Regex {
    Regex::new(p).expect("static regex")
}

static AT_TAG: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*@([A-Za-z][\w-]*)(\[[^\]]*\])?(?:\s+(.*?))?\s*$"));
static ANY_TAG: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*[@\\]([A-Za-z][\w-]*)(\[[^\]]*\])?(?:\s+(.*?))?\s*$"));

static JAVADOC_PARAM: LazyLock<Regex> = LazyLock::new(|| re(r"^(<\w+>|\w+)(?:\s+(.*))?$"));
static JAVADOC_THROWS: LazyLock<Regex> = LazyLock::new(|| re(r"^([\w.$]+)(?:\s+(.*))?$"));
static JSDOC_PARAM: LazyLock<Regex> =
    LazyLock::new(|| re(r"^(?:\{([^}]*)\}\s*)?\[?([\w.$]+)(?:=[^\]]*)?\]?(?:\s*-\s*|\s+|$)(.*)$"));
static JSDOC_TYPED: LazyLock<Regex> = LazyLock::new(|| re(r"^(?:\{([^}]*)\}\s*)?(?:-\s*)?(.*)$"));
static PHP_PARAM: LazyLock<Regex> = LazyLock::new(|| re(r"^(?:([^\s$]\S*)\s+)?(?:\.\.\.)?&?\$(\w+)(?:\s+(.*))?$"));
static TYPE_THEN_TEXT: LazyLock<Regex> = LazyLock::new(|| re(r"^(\S+)(?:\s+(.*))?$"));
static DOXY_PARAM: LazyLock<Regex> = LazyLock::new(|| re(r"^(\w+)(?:\s+(.*))?$"));
static YARD_PARAM: LazyLock<Regex> =
    LazyLock::new(|| re(r"^(?:\[([^\]]*)\]\s+)?(\w+[?!]?)(?:\s+\[([^\]]*)\])?(?:\s+(.*))?$"));
static YARD_RETURN: LazyLock<Regex> = LazyLock::new(|| re(r"^(?:\[([^\]]*)\])?\s*(.*)$"));
static YARD_RAISE: LazyLock<Regex> = LazyLock::new(|| re(r"^\[([^\]]+)\](?:\s+(.*))?$"));

static RDOC_LABEL: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*(\+\w+[?!]?\+|\w+[?!]?)::\s+(\S.*)$"));
static RDOC_BRACKET: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*\[(\+?\w+[?!]?\+?)\]\s+(\S.*)$"));

const JAVADOC_TAGS: &[&str] = &[
    "param", "return", "throws", "exception", "see", "since", "author", "version", "deprecated", "serial",
    "serialField", "serialData", "apiNote", "implSpec", "implNote", "hidden", "inheritDoc",
];
const JSDOC_TAGS: &[&str] = &[
    "param", "arg", "argument", "returns", "return", "throws", "exception", "prop", "property", "type", "typedef",
    "callback", "async", "function", "func", "method", "class", "constructor", "constant", "const", "default",
    "deprecated", "description", "desc", "example", "exports", "external", "file", "fires", "event", "global",
    "ignore", "inner", "instance", "kind", "lends", "license", "listens", "member", "memberof", "mixes", "mixin",
    "module", "name", "namespace", "override", "private", "protected", "public", "readonly", "requires", "see",
    "since", "static", "summary", "this", "todo", "tutorial", "version", "yields", "yield", "abstract", "access",
    "alias", "augments", "extends", "author", "borrows", "copyright", "enum", "generator", "hideconstructor",
    "implements", "interface", "variation", "template", "link",
];
const PHPDOC_TAGS: &[&str] = &[
    "param", "return", "returns", "throws", "throw", "var", "api", "author", "category", "copyright", "deprecated",
    "example", "filesource", "global", "ignore", "internal", "license", "link", "method", "package", "property",
    "property-read", "property-write", "see", "since", "source", "subpackage", "todo", "uses", "used", "version",
    "inheritdoc", "access", "static", "abstract", "final",
];
const DOXYGEN_TAGS: &[&str] = &[
    "brief", "short", "details", "param", "tparam", "return", "returns", "result", "retval", "throw", "throws",
    "exception", "note", "warning", "see", "sa", "since", "author", "version", "date", "pre", "post", "deprecated",
    "todo", "bug", "invariant", "attention", "remark", "remarks", "par", "code", "endcode", "file", "class",
    "struct", "fn", "def", "var", "typedef", "namespace", "defgroup", "ingroup", "addtogroup", "copydoc",
    "overload", "private", "public", "protected", "internal", "example",
];
const YARD_TAGS: &[&str] = &[
    "param", "return", "raise", "yield", "yieldparam", "yieldreturn", "option", "example", "see", "note", "since",
    "deprecated", "author", "api", "private", "abstract", "overload", "todo", "version", "attr", "attr_reader",
    "attr_writer",
];

struct Spec {
    tags: &'static [&'static str],
    required: &'static [&'static str],
    backslash: bool,
}

fn spec(style: StyleId) -> Spec {
    match style {
        StyleId::Javadoc => Spec { tags: JAVADOC_TAGS, required: &["param", "return", "throws", "exception"], backslash: false },
        StyleId::JSDoc => Spec {
            tags: JSDOC_TAGS,
            required: &[
                "param", "arg", "argument", "returns", "return", "throws", "exception", "type", "typedef", "property",
                "prop", "callback", "yields",
            ],
            backslash: false,
        },
        StyleId::PHPDoc => Spec { tags: PHPDOC_TAGS, required: &["param", "return", "returns", "throws", "var"], backslash: false },
        StyleId::Doxygen => Spec {
            tags: DOXYGEN_TAGS,
            required: &[
                "brief", "short", "details", "param", "tparam", "return", "returns", "retval", "throw", "throws",
                "exception",
            ],
            backslash: true,
        },
        StyleId::Yard => Spec {
            tags: YARD_TAGS,
            required: &["param", "return", "raise", "yield", "yieldparam", "yieldreturn", "option"],
            backslash: false,
        },
        _ => unreachable!("not a tag style"),
    }
}

struct Tag<'a> {
    name: &'a str,
    direction: Option<&'a str>,
    first: &'a str,
    text: String,
}

fn split_tags<'a>(text: &'a str, backslash: bool) -> (Vec<&'a str>, Vec<Tag<'a>>) {
    let tag_re: &Regex = if backslash { &ANY_TAG } else { &AT_TAG };
    let mut desc = Vec::new();
    let mut tags: Vec<Tag<'a>> = Vec::new();
    for line in text.lines() {
        if let Some(c) = tag_re.captures(line) {
            let first = c.get(3).map_or("", |m| m.as_str());
            tags.push(Tag {
                name: c.get(1).unwrap().as_str(),
                direction: c.get(2).map(|m| m.as_str()),
                first,
                text: first.to_string(),
            });
            continue;
        }
        match tags.last_mut() {
            Some(t) => {
                t.text.push('\n');
                t.text.push_str(line.trim());
            }
            None => desc.push(line),
        }
    }
    (desc, tags)
}

fn flat(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn shape_ok(style: StyleId, tag: &Tag<'_>) -> bool {
    let first = tag.first;
    match (style, tag.name) {
        (_, name) if tag.direction.is_some() => style == StyleId::Doxygen && name == "param",
        (StyleId::Javadoc, "param") => JAVADOC_PARAM.is_match(first),
        (StyleId::Javadoc, "throws" | "exception") => JAVADOC_THROWS.is_match(first),
        (StyleId::JSDoc, "param" | "arg" | "argument" | "prop" | "property") => JSDOC_PARAM.is_match(first),
        (StyleId::PHPDoc, "param") => PHP_PARAM.is_match(first),
        (StyleId::PHPDoc, "return" | "returns" | "throws" | "throw") => TYPE_THEN_TEXT.is_match(first),
        (StyleId::Doxygen, "param") => DOXY_PARAM.is_match(first),
        (StyleId::Doxygen, "throw" | "throws" | "exception") => TYPE_THEN_TEXT.is_match(first),
        (StyleId::Yard, "param") => YARD_PARAM.is_match(first),
        (StyleId::Yard, "raise") => YARD_RAISE.is_match(first),
        _ => true,
    }
}

pub fn matches(text: &str, style: StyleId) -> bool {
    let sp = spec(style);
    let (_, tags) = split_tags(text, sp.backslash);
    !tags.is_empty()
        && tags.iter().any(|t| sp.required.contains(&t.name))
        && tags.iter().all(|t| sp.tags.contains(&t.name) && shape_ok(style, t))
}

fn with_rest(first: Option<&str>, tag: &Tag<'_>) -> String {
    let extra = tag.text.strip_prefix(tag.first).unwrap_or("");
    flat(&format!("{}{}", first.unwrap_or(""), extra))
}

pub fn parse(text: &str, style: StyleId) -> DocstringMetadata {
    let sp = spec(style);
    let (desc, tags) = split_tags(text, sp.backslash);
    let mut b = Builder { description: desc.iter().map(|s| s.to_string()).collect(), ..Default::default() };
    for t in &tags {
        if !sp.tags.contains(&t.name) || !shape_ok(style, t) {
            b.unparsed(&format!("@{} {}", t.name, flat(&t.text)));
            continue;
        }
        let first = t.first;
        match (style, t.name) {
            (StyleId::Javadoc, "param") => {
                let c = JAVADOC_PARAM.captures(first).unwrap();
                b.param(&c[1], None, &with_rest(c.get(2).map(|m| m.as_str()), t));
            }
            (StyleId::Javadoc, "return") => b.returns(None, &flat(&t.text)),
            (StyleId::Javadoc, "throws" | "exception") => {
                let c = JAVADOC_THROWS.captures(first).unwrap();
                b.raise(&c[1], &with_rest(c.get(2).map(|m| m.as_str()), t));
            }
            (StyleId::JSDoc, "param" | "arg" | "argument") => {
                let c = JSDOC_PARAM.captures(first).unwrap();
                b.param(&c[2], c.get(1).map(|m| m.as_str()), &with_rest(c.get(3).map(|m| m.as_str()), t));
            }
            (StyleId::JSDoc, "returns" | "return") => {
                let c = JSDOC_TYPED.captures(first).unwrap();
                b.returns(c.get(1).map(|m| m.as_str()), &with_rest(c.get(2).map(|m| m.as_str()), t));
            }
            (StyleId::JSDoc, "throws" | "exception") => {
                let c = JSDOC_TYPED.captures(first).unwrap();
                let desc = with_rest(c.get(2).map(|m| m.as_str()), t);
                match c.get(1) {
                    Some(ty) => b.raise(ty.as_str(), &desc),
                    None => match desc.split_once(' ') {
                        Some((exc, rest)) => b.raise(exc, rest),
                        None => b.raise(&desc, ""),
                    },
                }
            }
            (StyleId::PHPDoc, "param") => {
                let c = PHP_PARAM.captures(first).unwrap();
                b.param(&c[2], c.get(1).map(|m| m.as_str()), &with_rest(c.get(3).map(|m| m.as_str()), t));
            }
            (StyleId::PHPDoc, "return" | "returns") => {
                let c = TYPE_THEN_TEXT.captures(first).unwrap();
                b.returns(Some(&c[1]), &with_rest(c.get(2).map(|m| m.as_str()), t));
            }
            (StyleId::PHPDoc, "throws" | "throw") | (StyleId::Doxygen, "throw" | "throws" | "exception") => {
                let c = TYPE_THEN_TEXT.captures(first).unwrap();
                b.raise(&c[1], &with_rest(c.get(2).map(|m| m.as_str()), t));
            }
            (StyleId::Doxygen, "param") => {
                let c = DOXY_PARAM.captures(first).unwrap();
                b.param(&c[1], None, &with_rest(c.get(2).map(|m| m.as_str()), t));
            }
            (StyleId::Doxygen, "return" | "returns" | "result") => b.returns(None, &flat(&t.text)),
            (StyleId::Doxygen, "brief" | "short" | "details") => b.description.push(t.text.clone()),
            (StyleId::Yard, "param") => {
                let c = YARD_PARAM.captures(first).unwrap();
                let ty = c.get(1).or(c.get(3)).map(|m| m.as_str());
                b.param(&c[2], ty, &with_rest(c.get(4).map(|m| m.as_str()), t));
            }
            (StyleId::Yard, "return") => {
                let c = YARD_RETURN.captures(first).unwrap();
                b.returns(c.get(1).map(|m| m.as_str()), &with_rest(c.get(2).map(|m| m.as_str()), t));
            }
            (StyleId::Yard, "raise") => {
                let c = YARD_RAISE.captures(first).unwrap();
                b.raise(&c[1], &with_rest(c.get(2).map(|m| m.as_str()), t));
            }
            (_, name) => b.other(name, &t.text),
        }
    }
    b.finish(style)
}

pub fn rdoc_matches(text: &str) -> bool {
    if text.lines().any(|l| AT_TAG.is_match(l)) {
        return false;
    }
    text.lines()
        .any(|l| l.trim() == "call-seq:" || RDOC_LABEL.is_match(l) || RDOC_BRACKET.is_match(l))
}

pub fn parse_rdoc(text: &str) -> DocstringMetadata {
    let mut b = Builder::default();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if line.trim() == "call-seq:" {
            let base = indent_of(line);
            let mut j = i + 1;
            let mut body = Vec::new();
            while j < lines.len() && (lines[j].trim().is_empty() || indent_of(lines[j]) > base) {
                body.push(lines[j].trim());
                j += 1;
            }
            b.other("call-seq", body.join("\n").trim());
            i = j;
            continue;
        }
        if let Some(c) = RDOC_LABEL.captures(line).or_else(|| RDOC_BRACKET.captures(line)) {
            b.param(c[1].trim_matches('+'), None, &c[2]);
            i += 1;
            continue;
        }
        b.description.push(line.to_string());
        i += 1;
    }
    b.finish(StyleId::Rdoc)
}
