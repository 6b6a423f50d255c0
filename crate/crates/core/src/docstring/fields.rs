//! Field-list styles: reST (`:param x:`) and Epytext (`@param x:`).

use std::sync::LazyLock;

use regex::Regex;

use super::{indent_of, Builder, DocstringMetadata, StyleId};

static REST_FIELD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^:([A-Za-z]+)(?:\s+([^:]*?))?:(?:\s+(.*))?$").unwrap());
static REST_FIELD_LIKE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^:[A-Za-z]+(?:\s[^:]*)?:(?:\s|$)").unwrap());
static EPY_FIELD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^@([A-Za-z]+)(?:\s+([^:]*?))?:(?:\s+(.*))?$").unwrap());
static EPY_FIELD_LIKE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^@[A-Za-z]").unwrap());

const REST_NAMES: &[&str] = &[
    "param", "parameter", "arg", "argument", "key", "keyword", "type", "raises", "raise", "except", "exception",
    "returns", "return", "rtype", "var", "ivar", "cvar", "vartype", "yields", "yield", "ytype", "meta",
];
const EPY_NAMES: &[&str] = &[
    "param", "type", "return", "returns", "rtype", "raise", "raises", "keyword", "kwarg", "ivar", "cvar", "var",
    "see", "note", "since", "author", "version", "deprecated", "todo",
];

struct Field<'a> {
    name: &'a str,
    arg: Option<&'a str>,
    value: String,
}

/// Splits into description lines and fields (with continuation lines folded
/// into the field value).
fn fields<'a>(text: &'a str, field: &Regex) -> (Vec<&'a str>, Vec<Field<'a>>) {
    let mut desc = Vec::new();
    let mut out: Vec<Field<'a>> = Vec::new();
    for line in text.lines() {
        if indent_of(line) == 0 {
            if let Some(c) = field.captures(line) {
                out.push(Field {
                    name: c.get(1).unwrap().as_str(),
                    arg: c.get(2).map(|m| m.as_str().trim()).filter(|s| !s.is_empty()),
                    value: c.get(3).map_or("", |m| m.as_str()).trim().to_string(),
                });
                continue;
            }
        }
        match out.last_mut() {
            Some(f) if indent_of(line) > 0 && !line.trim().is_empty() => {
                if !f.value.is_empty() {
                    f.value.push(' ');
                }
                f.value.push_str(line.trim());
            }
            _ => desc.push(line),
        }
    }
    (desc, out)
}

fn strict(text: &str, like: &Regex, field: &Regex, names: &[&str]) -> bool {
    let mut any = false;
    for line in text.lines().filter(|l| like.is_match(l)) {
        match field.captures(line) {
            Some(c) if names.contains(&&c[1]) => any = true,
            _ => return false,
        }
    }
    any
}

pub fn rest_matches(text: &str) -> bool {
    strict(text, &REST_FIELD_LIKE, &REST_FIELD, REST_NAMES)
}

pub fn epytext_matches(text: &str) -> bool {
    strict(text, &EPY_FIELD_LIKE, &EPY_FIELD, EPY_NAMES)
}

/// `int x` → (`x`, Some(`int`)).
fn name_and_type(arg: &str) -> (&str, Option<&str>) {
    match arg.rsplit_once(char::is_whitespace) {
        Some((ty, name)) => (name, Some(ty.trim())),
        None => (arg, None),
    }
}

fn build(text: &str, field: &Regex, style: StyleId) -> DocstringMetadata {
    let (desc, fs) = fields(text, field);
    let mut b = Builder { description: desc.iter().map(|s| s.to_string()).collect(), ..Default::default() };
    for f in fs {
        match (f.name, f.arg) {
            ("param" | "parameter" | "arg" | "argument" | "key" | "keyword" | "kwarg", Some(arg)) => {
                let (name, ty) = name_and_type(arg);
                b.param(name, ty, &f.value);
            }
            ("type", Some(arg)) => b.param_type(arg, &f.value),
            ("returns" | "return", None) => b.returns(None, &f.value),
            ("rtype", None) => b.returns(Some(&f.value), ""),
            ("raises" | "raise" | "except" | "exception", Some(arg)) => b.raise(arg, &f.value),
            ("raises" | "raise", None) => match f.value.split_once(char::is_whitespace) {
                Some((exc, rest)) => b.raise(exc, rest),
                None => b.raise(&f.value, ""),
            },
            (name, arg) if REST_NAMES.contains(&name) || EPY_NAMES.contains(&name) => {
                let known_shape = !matches!(name, "param" | "parameter" | "arg" | "argument" | "type" | "returns" | "return" | "rtype");
                let text = match arg {
                    Some(a) => format!("{a}: {}", f.value),
                    None => f.value.clone(),
                };
                if known_shape {
                    b.other(name, &text);
                } else {
                    b.unparsed(&text);
                }
            }
            (name, _) => b.unparsed(&format!("{name}: {}", f.value)),
        }
    }
    b.finish(style)
}

pub fn parse_rest(text: &str) -> DocstringMetadata {
    build(text, &REST_FIELD, StyleId::ReST)
}

pub fn parse_epytext(text: &str) -> DocstringMetadata {
    build(text, &EPY_FIELD, StyleId::Epytext)
}
