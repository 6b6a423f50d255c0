//! Docstring style detection and metadata parsing.
//!
//! Detection is strict: a docstring is assigned a style only when its section
//! markers follow that style's grammar exactly. Parsing never drops text;
//! malformed section content lands in `other_tags["unparsed"]`.

mod fields;
mod sections;
mod tags;
mod xml;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::language::LanguageId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StyleId {
    Google,
    NumPy,
    #[serde(rename = "reST")]
    ReST,
    Epytext,
    Javadoc,
    JSDoc,
    PHPDoc,
    Doxygen,
    XmlDoc,
    Yard,
    Rdoc,
    Unstyled,
}

impl StyleId {
    pub const ALL: [StyleId; 12] = [
        StyleId::Google,
        StyleId::NumPy,
        StyleId::ReST,
        StyleId::Epytext,
        StyleId::Javadoc,
        StyleId::JSDoc,
        StyleId::PHPDoc,
        StyleId::Doxygen,
        StyleId::XmlDoc,
        StyleId::Yard,
        StyleId::Rdoc,
        StyleId::Unstyled,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StyleId::Google => "Google",
            StyleId::NumPy => "NumPy",
            StyleId::ReST => "reST",
            StyleId::Epytext => "Epytext",
            StyleId::Javadoc => "Javadoc",
            StyleId::JSDoc => "JSDoc",
            StyleId::PHPDoc => "PHPDoc",
            StyleId::Doxygen => "Doxygen",
            StyleId::XmlDoc => "XmlDoc",
            StyleId::Yard => "Yard",
            StyleId::Rdoc => "Rdoc",
            StyleId::Unstyled => "Unstyled",
        }
    }
}

impl fmt::Display for StyleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StyleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StyleId::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown docstring style '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub type_hint: Option<String>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Returns {
    pub type_hint: Option<String>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Raise {
    pub exception: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocstringMetadata {
    pub style: StyleId,
    pub description: String,
    pub short_docstring: String,
    pub params: Vec<Param>,
    pub returns: Option<Returns>,
    pub raises: Vec<Raise>,
    pub other_tags: BTreeMap<String, String>,
}

impl DocstringMetadata {
    pub fn unstyled(text: &str) -> Self {
        let description = text.trim().to_string();
        DocstringMetadata {
            style: StyleId::Unstyled,
            short_docstring: short_docstring(&description),
            description,
            params: Vec::new(),
            returns: None,
            raises: Vec::new(),
            other_tags: BTreeMap::new(),
        }
    }

    /// Structured attributes: params, the return entry and raised exceptions.
    pub fn attribute_count(&self) -> usize {
        self.params.len() + usize::from(self.returns.is_some()) + self.raises.len()
    }
}

/// Collects metadata while a style parser walks the docstring.
#[derive(Debug, Default)]
struct Builder {
    description: Vec<String>,
    params: Vec<Param>,
    returns: Option<Returns>,
    raises: Vec<Raise>,
    other: BTreeMap<String, Vec<String>>,
}

impl Builder {
    fn param(&mut self, name: &str, type_hint: Option<&str>, description: &str) {
        self.params.push(Param {
            name: name.to_string(),
            type_hint: non_empty(type_hint),
            description: description.trim().to_string(),
        });
    }

    /// Attaches a type to an already-seen parameter, or records it.
    fn param_type(&mut self, name: &str, type_hint: &str) {
        match self.params.iter_mut().find(|p| p.name == name) {
            Some(p) => p.type_hint = non_empty(Some(type_hint)),
            None => self.param(name, Some(type_hint), ""),
        }
    }

    fn returns(&mut self, type_hint: Option<&str>, description: &str) {
        let r = self.returns.get_or_insert(Returns { type_hint: None, description: String::new() });
        if let Some(t) = non_empty(type_hint) {
            r.type_hint = Some(t);
        }
        let d = description.trim();
        if !d.is_empty() {
            if !r.description.is_empty() {
                r.description.push('\n');
            }
            r.description.push_str(d);
        }
    }

    fn raise(&mut self, exception: &str, description: &str) {
        self.raises.push(Raise { exception: exception.to_string(), description: description.trim().to_string() });
    }

    fn other(&mut self, tag: &str, text: &str) {
        self.other.entry(tag.to_string()).or_default().push(text.trim().to_string());
    }

    fn unparsed(&mut self, text: &str) {
        self.other("unparsed", text);
    }

    fn finish(self, style: StyleId) -> DocstringMetadata {
        let description = self.description.join("\n").trim().to_string();
        DocstringMetadata {
            style,
            short_docstring: short_docstring(&description),
            description,
            params: self.params,
            returns: self.returns,
            raises: self.raises,
            other_tags: self.other.into_iter().map(|(k, v)| (k, v.join("\n"))).collect(),
        }
    }
}

fn non_empty(s: Option<&str>) -> Option<String> {
    s.map(str::trim).filter(|s| !s.is_empty()).map(str::to_string)
}

fn indent_of(line: &str) -> usize {
    line.len() - line.trim_start_matches([' ', '\t']).len()
}

/// Styles tried for each language, most specific first.
pub fn style_priority(language: LanguageId) -> &'static [StyleId] {
    match language {
        LanguageId::Python => &[StyleId::Google, StyleId::NumPy, StyleId::ReST, StyleId::Epytext],
        LanguageId::Java => &[StyleId::Javadoc, StyleId::Doxygen],
        LanguageId::JavaScript => &[StyleId::JSDoc],
        LanguageId::Php => &[StyleId::PHPDoc],
        LanguageId::C | LanguageId::Cpp => &[StyleId::Doxygen],
        LanguageId::CSharp => &[StyleId::XmlDoc, StyleId::Doxygen],
        LanguageId::Go => &[],
        LanguageId::Ruby => &[StyleId::Yard, StyleId::Rdoc],
        LanguageId::Rust => &[StyleId::Doxygen],
    }
}

/// Whether `docstring` follows `style` strictly.
pub fn matches_style(docstring: &str, style: StyleId) -> bool {
    match style {
        StyleId::Google => sections::google_matches(docstring),
        StyleId::NumPy => sections::numpy_matches(docstring),
        StyleId::ReST => fields::rest_matches(docstring),
        StyleId::Epytext => fields::epytext_matches(docstring),
        StyleId::Javadoc | StyleId::JSDoc | StyleId::PHPDoc | StyleId::Doxygen | StyleId::Yard => {
            tags::matches(docstring, style)
        }
        StyleId::Rdoc => tags::rdoc_matches(docstring),
        StyleId::XmlDoc => xml::matches(docstring),
        StyleId::Unstyled => true,
    }
}

/// First style in the language's priority list that matches strictly.
pub fn detect_style(docstring: &str, language: LanguageId) -> StyleId {
    style_priority(language)
        .iter()
        .copied()
        .find(|s| matches_style(docstring, *s))
        .unwrap_or(StyleId::Unstyled)
}

/// Parses `docstring` according to `style`.
pub fn parse_metadata(docstring: &str, style: StyleId) -> DocstringMetadata {
    if docstring.trim().is_empty() {
        return DocstringMetadata::unstyled("");
    }
    match style {
        StyleId::Google => sections::parse_google(docstring),
        StyleId::NumPy => sections::parse_numpy(docstring),
        StyleId::ReST => fields::parse_rest(docstring),
        StyleId::Epytext => fields::parse_epytext(docstring),
        StyleId::Javadoc | StyleId::JSDoc | StyleId::PHPDoc | StyleId::Doxygen | StyleId::Yard => {
            tags::parse(docstring, style)
        }
        StyleId::Rdoc => tags::parse_rdoc(docstring),
        StyleId::XmlDoc => xml::parse(docstring),
        StyleId::Unstyled => DocstringMetadata::unstyled(docstring),
    }
}

/// Detects the style and parses in one step.
pub fn analyze(docstring: &str, language: LanguageId) -> DocstringMetadata {
    parse_metadata(docstring, detect_style(docstring, language))
}

/// First sentence of `description`.
///
/// A `.`, `!` or `?` ends the sentence when it is followed by the end of the
/// text, or by whitespace and then a character that is not lowercase.
/// Without such a terminator the first line is used.
pub fn short_docstring(description: &str) -> String {
    let text = description.trim();
    for (i, c) in text.char_indices() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let rest = &text[i + 1..];
        if rest.is_empty() {
            return text.to_string();
        }
        if rest.starts_with(char::is_whitespace) {
            let next = rest.trim_start().chars().next();
            if next.is_none_or(|n| !n.is_lowercase()) {
                return text[..=i].to_string();
            }
        }
    }
    text.lines().next().unwrap_or("").trim_end().to_string()
}
