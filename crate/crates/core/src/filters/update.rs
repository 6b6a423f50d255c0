//! Update-action filters.
//!
//! Every filter is a deletion pass wrapped in [`fixpoint`], which re-applies
//! the pass until nothing changes. The wrapper also rejects any step that does
//! not shrink the text, so each public filter is idempotent and never makes
//! its input longer.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::{Captures, Regex};

use super::FilterId;

fn re(pattern: &str) -> Regex {
    Regex::new(pattern).expect("static regex")
}

/// Line endings, trailing blanks, common indentation and blank-line runs.
pub fn normalize(text: &str) -> String {
    let text = text.replace("\r\n", "\n").replace('\r', "");
    let mut lines: Vec<&str> = text.lines().map(str::trim_end).collect();
    let first = lines.iter().position(|l| !l.is_empty()).unwrap_or(lines.len());
    lines.drain(..first);
    while lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    if lines.is_empty() {
        return String::new();
    }
    let indent = lines[1..]
        .iter()
        .filter(|l| !l.is_empty())
        .map(|l| indent_of(l))
        .min()
        .unwrap_or(0);
    let mut out = String::with_capacity(text.len());
    let mut blank_run = false;
    for (i, line) in lines.iter().enumerate() {
        let line = if i == 0 { line.trim_start() } else if line.is_empty() { line } else { &line[indent..] };
        if line.is_empty() {
            if blank_run {
                continue;
            }
            blank_run = true;
        } else {
            blank_run = false;
        }
        if i > 0 {
            out.push('\n');
        }
        out.push_str(line);
    }
    out
}

fn indent_of(line: &str) -> usize {
    line.len() - line.trim_start_matches([' ', '\t']).len()
}

fn is_blank(line: &str) -> bool {
    line.trim().is_empty()
}

/// Repeats `pass` (followed by [`normalize`]) until the text stops shrinking.
pub fn fixpoint(text: &str, pass: impl Fn(&str) -> String) -> String {
    let mut cur = normalize(text);
    loop {
        let next = normalize(&pass(&cur));
        if next.len() >= cur.len() {
            return cur;
        }
        cur = next;
    }
}

// ---------------------------------------------------------------- delimiters

static PY_STRING: LazyLock<Regex> = LazyLock::new(|| re(r#"^[rRuUbBfF]{0,2}("""|'''|"|')"#));

fn delimiters_pass(text: &str) -> String {
    let s = text.trim();
    if let Some(rest) = s.strip_prefix("/*") {
        let rest = rest.trim_start_matches(['*', '!']);
        let inner = match rest.strip_suffix("*/") {
            Some(r) => r.trim_end_matches('*'),
            None => rest,
        };
        return strip_gutters(inner);
    }
    if let Some(m) = PY_STRING.captures(s) {
        let open = m.get(0).unwrap().end();
        let quote = m.get(1).unwrap().as_str();
        if s.len() >= open + quote.len() && s.ends_with(quote) {
            return s[open..s.len() - quote.len()].to_string();
        }
        return s[open..].to_string();
    }
    let lines: Vec<&str> = s.lines().collect();
    if lines.len() >= 2 && lines[0].starts_with("=begin") && lines[lines.len() - 1].starts_with("=end") {
        return lines[1..lines.len() - 1].join("\n");
    }
    if let Some(marker) = line_marker(&lines) {
        return lines
            .iter()
            .map(|l| {
                let t = l.trim_start();
                if t.is_empty() {
                    return "";
                }
                let t = match marker {
                    "//" => t.strip_prefix("///").or_else(|| t.strip_prefix("//!")).unwrap_or(&t[2..]),
                    _ => &t[marker.len()..],
                };
                t.strip_prefix(' ').unwrap_or(t)
            })
            .collect::<Vec<_>>()
            .join("\n");
    }
    s.to_string()
}

/// The line-comment marker shared by every non-blank line, if any.
fn line_marker(lines: &[&str]) -> Option<&'static str> {
    ["//", "#", "--"].into_iter().find(|m| {
        let mut any = false;
        for l in lines {
            let t = l.trim_start();
            if t.is_empty() {
                continue;
            }
            if !t.starts_with(m) {
                return false;
            }
            any = true;
        }
        any
    })
}

/// Removes ` * ` gutters when every line after the first carries one.
fn strip_gutters(inner: &str) -> String {
    let lines: Vec<&str> = inner.lines().collect();
    let gutters = lines.iter().skip(1).filter(|l| !is_blank(l)).all(|l| l.trim_start().starts_with('*'));
    if !gutters {
        return inner.to_string();
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let t = l.trim_start();
            if i == 0 && !t.starts_with('*') {
                return *l;
            }
            match t.strip_prefix('*') {
                Some(rest) => rest.strip_prefix(' ').unwrap_or(rest),
                None => t,
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Strips comment and string delimiters (`/** */`, `///`, `#`, `"""`, ...).
pub fn strip_delimiters(text: &str) -> String {
    fixpoint(text, delimiters_pass)
}

// ---------------------------------------------------------------- hyperlinks

static URL: LazyLock<Regex> =
    LazyLock::new(|| re(r#"(?i)\b(?:https?|ftp|file)://[^\s<>"'`]+|\bwww\.[a-z0-9-]+\.[^\s<>"'`]+"#));
static MD_LINK: LazyLock<Regex> = LazyLock::new(|| re(r"\[([^\]\n]*)\]\((?i:https?|ftp|file)://[^)\s]*\)"));
static LINK_TAG_URL: LazyLock<Regex> = LazyLock::new(|| re(r"\{@link(?:plain)?\s+(?i:https?|ftp)://[^}]*\}"));
static ANGLE_URL: LazyLock<Regex> = LazyLock::new(|| re(r"<(?i:https?|ftp|file)://[^>\s]*>"));
static EMPTY_BRACKETS: LazyLock<Regex> = LazyLock::new(|| re(r"\(\s*\)|\[\s*\]|<\s*>|\{\s*\}"));
static INNER_SPACES: LazyLock<Regex> = LazyLock::new(|| re(r"(\S) {2,}"));
static SPACE_BEFORE_CLOSE: LazyLock<Regex> = LazyLock::new(|| re(r"(\S) +([)\]])"));
static LINK_INTRO_ONLY: LazyLock<Regex> = LazyLock::new(|| {
    re(r"(?ix)^\s*(?:[-*+]\s*)?
        (?:@see|@link|see(?:\s+also)?|links?|urls?|refs?|references?|more\s+info(?:rmation)?|more\s+details
          |details|docs?|documentation|sources?|homepage|website|visit|via|from|at
          |for\s+more\s+(?:info(?:rmation)?|details)(?:\s*,?\s*see)?)?
        \s*[:\-]*\s*\.?\s*$")
});

fn hyperlink_pass(text: &str) -> String {
    let mut out: Vec<String> = Vec::new();
    for line in text.lines() {
        if !(URL.is_match(line) || MD_LINK.is_match(line) || ANGLE_URL.is_match(line)) {
            out.push(line.to_string());
            continue;
        }
        let l = MD_LINK.replace_all(line, "$1");
        let l = LINK_TAG_URL.replace_all(&l, "");
        let l = ANGLE_URL.replace_all(&l, "");
        let l = URL.replace_all(&l, |c: &Captures| {
            let m = &c[0];
            let kept = m.trim_end_matches(['.', ',', ';', ':', ')', ']', '!', '?']);
            m[kept.len()..].to_string()
        });
        let l = EMPTY_BRACKETS.replace_all(&l, "");
        let l = INNER_SPACES.replace_all(&l, "$1 ");
        let l = SPACE_BEFORE_CLOSE.replace_all(&l, "$1$2");
        let l = l.trim_end();
        if !LINK_INTRO_ONLY.is_match(l) {
            out.push(l.to_string());
        }
    }
    out.join("\n")
}

/// Removes URLs and lines that only introduced a URL.
pub fn strip_hyperlinks(text: &str) -> String {
    fixpoint(text, hyperlink_pass)
}

// ------------------------------------------------------------- embedded code

static CODE_DIRECTIVE: LazyLock<Regex> =
    LazyLock::new(|| re(r"^\s*(?:\.\.\s+)?(?:code-block|sourcecode|code|highlight|literalinclude)::"));
static DOXY_CODE: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*[@\\]code\b"));
static DOXY_ENDCODE: LazyLock<Regex> = LazyLock::new(|| re(r"[@\\]endcode\b"));
static PRE_OPEN: LazyLock<Regex> = LazyLock::new(|| re(r"(?i)^\s*<pre\b"));
static PRE_CLOSE: LazyLock<Regex> = LazyLock::new(|| re(r"(?i)</pre\s*>"));
static SHELL_PROMPT: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*\$ \S"));

fn embedded_code_pass(text: &str) -> String {
    let lines: Vec<&str> = text.lines().collect();
    let n = lines.len();
    let mut out: Vec<&str> = Vec::new();
    let mut i = 0;
    while i < n {
        let line = lines[i];
        let t = line.trim_start();
        if t.starts_with("```") || t.starts_with("~~~") {
            let fence = &t[..3];
            let close = (i + 1..n).find(|&j| lines[j].trim_start().starts_with(fence));
            i = close.map_or(n, |j| j + 1);
            continue;
        }
        if CODE_DIRECTIVE.is_match(line) {
            out.push(line);
            let end = indented_block_end(&lines, i);
            if end > i + 1 && end < n {
                out.push("");
            }
            i = end;
            continue;
        }
        if t.starts_with(">>>") {
            i += 1;
            while i < n && !is_blank(lines[i]) {
                i += 1;
            }
            continue;
        }
        if DOXY_CODE.is_match(line) {
            let close = (i..n).find(|&j| DOXY_ENDCODE.is_match(lines[j]));
            i = close.map_or(n, |j| j + 1);
            continue;
        }
        if PRE_OPEN.is_match(line) {
            let close = (i..n).find(|&j| PRE_CLOSE.is_match(lines[j]));
            i = close.map_or(n, |j| j + 1);
            continue;
        }
        if SHELL_PROMPT.is_match(line) {
            i += 1;
            continue;
        }
        out.push(line);
        i += 1;
    }
    out.join("\n")
}

/// End (exclusive) of the code block owned by the directive on line `at`.
/// The block exists only when its first line is indented past the directive;
/// it then runs over contiguous lines and any further indented paragraphs.
fn indented_block_end(lines: &[&str], at: usize) -> usize {
    let n = lines.len();
    let base = indent_of(lines[at]);
    let mut j = at + 1;
    while j < n && is_blank(lines[j]) {
        j += 1;
    }
    if j >= n || indent_of(lines[j]) <= base {
        return at + 1;
    }
    let mut k = j;
    loop {
        while k < n && !is_blank(lines[k]) {
            k += 1;
        }
        let mut m = k;
        while m < n && is_blank(lines[m]) {
            m += 1;
        }
        if m < n && indent_of(lines[m]) > base {
            k = m;
        } else {
            return k;
        }
    }
}

/// Removes code samples, keeping directive headers such as `code-block:: bash`.
pub fn strip_embedded_code(text: &str) -> String {
    fixpoint(text, embedded_code_pass)
}

// --------------------------------------------------------------------- math

static MATH_LINE: LazyLock<Regex> = LazyLock::new(|| {
    re(r"(?x)
        \\(?:sqrt|exp|frac|dfrac|mathbf|mathrm|mathcal|mathbb|sum|prod|int|alpha|beta|gamma|delta
            |epsilon|theta|lambda|sigma|mu|pi|phi|omega|log|ln|cdot|times|leq|geq|neq|approx|infty
            |partial|nabla|left|right|hat|bar|vec|operatorname|begin\{|end\{)\b
        | \$\$
        | \$[^$\n]*[\\^_][^$\n]*\$
        | :math:`
        | ^\s*\.\.\s+math::
        | ^\s*\[[^\]\n]+\]\s*=
    ")
});

fn math_pass(text: &str) -> String {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        if MATH_LINE.is_match(lines[i]) {
            while i < lines.len() && !is_blank(lines[i]) {
                i += 1;
            }
            continue;
        }
        out.push(lines[i]);
        i += 1;
    }
    out.join("\n")
}

/// Removes formula lines and the rest of their paragraph.
pub fn strip_math_formulas(text: &str) -> String {
    fixpoint(text, math_pass)
}

// ----------------------------------------------------------------- metadata

static INLINE_TAG: LazyLock<Regex> =
    LazyLock::new(|| re(r"\{@(?:code|literal|link|linkplain|value)\s+([^}]*)\}|\{@inheritDoc\}"));
static TAG_LINE: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*[@\\]([A-Za-z][A-Za-z0-9_]*)!?(?:\s|$)"));

pub(crate) fn default_metadata_tags() -> &'static BTreeSet<String> {
    static TAGS: LazyLock<BTreeSet<String>> = LazyLock::new(|| {
        super::FilterConfig::default().metadata.tags.iter().map(|t| t.to_lowercase()).collect()
    });
    &TAGS
}

fn metadata_pass(text: &str, tags: &BTreeSet<String>) -> String {
    let text = INLINE_TAG.replace_all(text, |c: &Captures| c.get(1).map_or(String::new(), |m| m.as_str().trim().to_string()));
    text.lines()
        .filter(|l| match TAG_LINE.captures(l) {
            Some(c) => !tags.contains(&c[1].to_lowercase()),
            None => true,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Removes bookkeeping tags such as `@since 1.0` or `@memberOf _`.
pub fn strip_metadata_tags_with(text: &str, tags: &BTreeSet<String>) -> String {
    fixpoint(text, |t| metadata_pass(t, tags))
}

pub fn strip_metadata_tags(text: &str) -> String {
    strip_metadata_tags_with(text, default_metadata_tags())
}

// --------------------------------------------------------------------- html

const INLINE_TAGS: &[&str] = &[
    "a", "abbr", "b", "big", "cite", "code", "del", "em", "font", "i", "ins", "kbd", "mark", "q", "s", "samp",
    "small", "span", "strike", "strong", "sub", "sup", "tt", "u", "var",
];
const BLOCK_TAGS: &[&str] = &[
    "blockquote", "br", "caption", "center", "dd", "div", "dl", "dt", "h1", "h2", "h3", "h4", "h5", "h6",
    "hr", "img", "li", "ol", "p", "table", "tbody", "td", "th", "thead", "tr", "ul",
];

static HTML_TAG: LazyLock<Regex> = LazyLock::new(|| re(r"</?([A-Za-z][A-Za-z0-9]*)(?:\s[^<>]*)?/?>"));
static ENTITY: LazyLock<Regex> = LazyLock::new(|| re(r"&(lt|gt|amp|quot|apos|nbsp|#39|#x27);"));

fn html_pass(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for c in HTML_TAG.captures_iter(text) {
        let m = c.get(0).unwrap();
        let name = c[1].to_ascii_lowercase();
        let block = BLOCK_TAGS.contains(&name.as_str());
        if !block && !INLINE_TAGS.contains(&name.as_str()) {
            continue;
        }
        out.push_str(&text[last..m.start()]);
        let before = text[..m.start()].chars().next_back();
        let after = text[m.end()..].chars().next();
        let glued = before.is_some_and(|c| !c.is_whitespace()) && after.is_some_and(|c| !c.is_whitespace());
        if block && glued {
            out.push(' ');
        }
        last = m.end();
    }
    out.push_str(&text[last..]);
    ENTITY
        .replace_all(&out, |c: &Captures| {
            match &c[1] {
                "lt" => "<",
                "gt" => ">",
                "amp" => "&",
                "quot" => "\"",
                "nbsp" => " ",
                _ => "'",
            }
            .to_string()
        })
        .into_owned()
}

/// Removes HTML markup, keeping the text between tags.
pub fn strip_html_tags(text: &str) -> String {
    fixpoint(text, html_pass)
}

// ------------------------------------------------------------ examples/notes

const NOTE_WORDS: &str = r"note|notes|nb|example|examples|for\s+example|example\s+usage|usage|sample|samples|warning|warnings|caution|hint|tip|tips|remark|remarks|attention|important";

static NOTE_COLON: LazyLock<Regex> =
    LazyLock::new(|| re(&format!(r"(?i)^\s*(?:\.\.\s+)?(?:{NOTE_WORDS})\s*::?(?:\s|$)")));
static NOTE_HEADING: LazyLock<Regex> = LazyLock::new(|| re(&format!(r"(?i)^\s*(#{{1,6}})\s+(?:{NOTE_WORDS})\s*$")));
static NOTE_NUMPY: LazyLock<Regex> = LazyLock::new(|| re(&format!(r"(?i)^\s*(?:{NOTE_WORDS})\s*$")));
static NOTE_TAG: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*[@\\](?:note|warning|remark|attention|example|examples)\b"));
static UNDERLINE: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*(?:-{3,}|={3,})\s*$"));
static HEADING: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*(#{1,6})\s"));
static SECTION_HEADER: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*[A-Za-z][\w ]*:\s*$"));
static TAG_START: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*[@\\][A-Za-z]"));

fn examples_notes_pass(text: &str) -> String {
    let lines: Vec<&str> = text.lines().collect();
    let n = lines.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let line = lines[i];
        if let Some(c) = NOTE_HEADING.captures(line) {
            let level = c[1].len();
            i = markdown_section_end(&lines, i, level);
            continue;
        }
        if NOTE_NUMPY.is_match(line) && i + 1 < n && UNDERLINE.is_match(lines[i + 1]) {
            let next = (i + 2..n).find(|&j| j + 1 < n && !is_blank(lines[j]) && UNDERLINE.is_match(lines[j + 1]));
            i = next.unwrap_or(n);
            continue;
        }
        if NOTE_TAG.is_match(line) {
            i += 1;
            while i < n && !is_blank(lines[i]) && !TAG_START.is_match(lines[i]) {
                i += 1;
            }
            continue;
        }
        if NOTE_COLON.is_match(line) {
            i = note_block_end(&lines, i);
            continue;
        }
        out.push(line);
        i += 1;
    }
    out.join("\n")
}

fn markdown_section_end(lines: &[&str], at: usize, level: usize) -> usize {
    let mut in_fence = false;
    for (j, l) in lines.iter().enumerate().skip(at + 1) {
        let t = l.trim_start();
        if t.starts_with("```") || t.starts_with("~~~") {
            in_fence = !in_fence;
            continue;
        }
        if !in_fence {
            if let Some(c) = HEADING.captures(l) {
                if c[1].len() <= level {
                    return j;
                }
            }
        }
    }
    lines.len()
}

/// A note spans its marker line, the unindented lines that follow it up to
/// the first blank line, and any paragraphs indented past the marker.
fn note_block_end(lines: &[&str], at: usize) -> usize {
    let n = lines.len();
    let base = indent_of(lines[at]);
    let mut seen_blank = false;
    let mut j = at + 1;
    while j < n {
        let l = lines[j];
        if is_blank(l) {
            let next = (j..n).find(|&k| !is_blank(lines[k]));
            match next {
                Some(k) if indent_of(lines[k]) > base => {
                    seen_blank = true;
                    j = k;
                    continue;
                }
                _ => return j,
            }
        }
        if indent_of(l) > base {
            j += 1;
            continue;
        }
        if seen_blank || SECTION_HEADER.is_match(l) || TAG_START.is_match(l) {
            return j;
        }
        j += 1;
    }
    n
}

/// Removes notes, warnings and usage examples.
pub fn handle_examples_notes(text: &str) -> String {
    fixpoint(text, examples_notes_pass)
}

// ---------------------------------------------------------------- questions

/// Byte offset of the first `?` that ends a question sentence.
fn question_mark(line: &str) -> Option<usize> {
    let bytes = line.as_bytes();
    for (p, _) in line.match_indices('?') {
        if p == 0 || (bytes[p - 1] as char).is_ascii_whitespace() {
            continue;
        }
        let rest = &line[p + 1..];
        match rest.chars().next() {
            None => return Some(p),
            Some(c) if c.is_whitespace() => {
                let next = rest.trim_start().chars().next();
                if next.is_none_or(|c| !c.is_lowercase()) {
                    return Some(p);
                }
            }
            _ => {}
        }
    }
    None
}

/// Start of the question ending at `q`: after the previous sentence, or at a
/// ` - ` / `: ` separator (which is removed too), or at the line start.
fn question_start(line: &str, q: usize) -> usize {
    let head = &line[..q];
    let mut start = 0;
    for (i, c) in head.char_indices() {
        let after = i + c.len_utf8();
        if matches!(c, '.' | '!' | '?') && head[after..].starts_with(char::is_whitespace) {
            start = start.max(after);
        }
    }
    for sep in [" - ", " -- ", " \u{2013} ", " \u{2014} ", ": "] {
        if let Some(i) = head.rfind(sep) {
            if i + sep.len() > start {
                start = start.max(i);
            }
        }
    }
    start
}

fn questions_pass(text: &str) -> String {
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    for idx in 0..lines.len() {
        let line = &lines[idx];
        let Some(q) = question_mark(line) else { continue };
        let start = question_start(line, q);
        let head = line[..start].trim_end();
        let tail = line[q + 1..].trim_start();
        let joined = match (head.is_empty(), tail.is_empty()) {
            (true, _) => tail.to_string(),
            (false, true) => head.to_string(),
            (false, false) => format!("{head} {tail}"),
        };
        if joined.is_empty() {
            lines.remove(idx);
        } else {
            lines[idx] = joined;
        }
        break;
    }
    lines.join("\n")
}

/// Removes question sentences.
pub fn handle_questions(text: &str) -> String {
    fixpoint(text, questions_pass)
}

// -------------------------------------------------------------------- entry

/// Applies one update filter using the given metadata tag catalog.
pub fn apply_update(id: FilterId, text: &str, tags: &BTreeSet<String>) -> String {
    match id {
        FilterId::StripDelimiters => strip_delimiters(text),
        FilterId::StripHyperlink => strip_hyperlinks(text),
        FilterId::StripEmbeddedCode => strip_embedded_code(text),
        FilterId::StripMathFormulas => strip_math_formulas(text),
        FilterId::StripMetadataTags => strip_metadata_tags_with(text, tags),
        FilterId::StripHtmlTags => strip_html_tags(text),
        FilterId::HandleExamplesNotes => handle_examples_notes(text),
        FilterId::HandleQuestions => handle_questions(text),
        _ => text.to_string(),
    }
}
