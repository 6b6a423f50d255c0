//! Section-based styles: Google and NumPy.

use std::sync::LazyLock;

use regex::Regex;

use super::{indent_of, Builder, DocstringMetadata, StyleId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Params,
    Returns,
    Raises,
    Other,
}

const GOOGLE_SECTIONS: &[(&str, Kind)] = &[
    ("Args", Kind::Params),
    ("Arguments", Kind::Params),
    ("Parameters", Kind::Params),
    ("Params", Kind::Params),
    ("Keyword Args", Kind::Params),
    ("Keyword Arguments", Kind::Params),
    ("Other Parameters", Kind::Params),
    ("Returns", Kind::Returns),
    ("Return", Kind::Returns),
    ("Raises", Kind::Raises),
    ("Exceptions", Kind::Raises),
    ("Except", Kind::Raises),
    ("Yields", Kind::Other),
    ("Yield", Kind::Other),
    ("Attributes", Kind::Other),
    ("Note", Kind::Other),
    ("Notes", Kind::Other),
    ("Example", Kind::Other),
    ("Examples", Kind::Other),
    ("Todo", Kind::Other),
    ("Warning", Kind::Other),
    ("Warnings", Kind::Other),
    ("Warns", Kind::Other),
    ("See Also", Kind::Other),
    ("References", Kind::Other),
    ("Methods", Kind::Other),
];

const NUMPY_SECTIONS: &[(&str, Kind)] = &[
    ("Parameters", Kind::Params),
    ("Other Parameters", Kind::Params),
    ("Receives", Kind::Params),
    ("Returns", Kind::Returns),
    ("Raises", Kind::Raises),
    ("Yields", Kind::Other),
    ("Warns", Kind::Other),
    ("Warnings", Kind::Other),
    ("See Also", Kind::Other),
    ("Notes", Kind::Other),
    ("References", Kind::Other),
    ("Examples", Kind::Other),
    ("Attributes", Kind::Other),
    ("Methods", Kind::Other),
];

fn re(p: &str) -> Regex {
    Regex::new(p).expect("static regex")
}

static GOOGLE_HEADER: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*([A-Z][A-Za-z ]*?):\s*$"));
static GOOGLE_PARAM: LazyLock<Regex> = LazyLock::new(|| re(r"^(\*{0,2}[A-Za-z_]\w*)\s*(?:\(([^()]*)\))?\s*:\s*(.*)$"));
static GOOGLE_RAISE: LazyLock<Regex> = LazyLock::new(|| re(r"^([A-Za-z_][\w.]*)\s*:\s*(.*)$"));
static GOOGLE_RETURN_TYPE: LazyLock<Regex> = LazyLock::new(|| {
    re(r"^([A-Za-z_][\w.]*(?:\[[^\]]*\])?(?:\s*\|\s*[A-Za-z_][\w.]*(?:\[[^\]]*\])?)*)\s*:\s+(.*)$")
});
static UNDERLINE: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*-{3,}\s*$"));
static NUMPY_PARAM: LazyLock<Regex> =
    LazyLock::new(|| re(r"^(\*{0,2}[A-Za-z_]\w*(?:\s*,\s*\*{0,2}[A-Za-z_]\w*)*)\s*(?::\s*(.*))?$"));
static NUMPY_NAMED_RETURN: LazyLock<Regex> = LazyLock::new(|| re(r"^([A-Za-z_]\w*)\s+:\s*(.+)$"));
static NUMPY_RAISE: LazyLock<Regex> = LazyLock::new(|| re(r"^([A-Za-z_][\w.]*)$"));

struct Section<'a> {
    name: &'a str,
    kind: Kind,
    body: Vec<&'a str>,
}

struct Split<'a> {
    description: Vec<&'a str>,
    sections: Vec<Section<'a>>,
}

fn trim_blank_tail(body: &mut Vec<&str>) {
    while body.last().is_some_and(|l| l.trim().is_empty()) {
        body.pop();
    }
}

fn google_split(text: &str) -> Split<'_> {
    let lines: Vec<&str> = text.lines().collect();
    let mut split = Split { description: Vec::new(), sections: Vec::new() };
    let mut i = 0;
    while i < lines.len() {
        let header = GOOGLE_HEADER
            .captures(lines[i])
            .and_then(|c| GOOGLE_SECTIONS.iter().find(|(n, _)| *n == c.get(1).unwrap().as_str()))
            .map(|(n, k)| (*n, *k));
        let Some((name, kind)) = header else {
            split.description.push(lines[i]);
            i += 1;
            continue;
        };
        let base = indent_of(lines[i]);
        let mut j = i + 1;
        while j < lines.len() && (lines[j].trim().is_empty() || indent_of(lines[j]) > base) {
            j += 1;
        }
        let mut body = lines[i + 1..j].to_vec();
        trim_blank_tail(&mut body);
        split.sections.push(Section { name, kind, body });
        i = j;
    }
    split
}

/// Groups body lines into entries: a line at the body's base indent starts an
/// entry, deeper lines continue it.
fn entries<'a>(body: &[&'a str]) -> Vec<(&'a str, Vec<&'a str>)> {
    let base = body.iter().filter(|l| !l.trim().is_empty()).map(|l| indent_of(l)).min().unwrap_or(0);
    let mut out: Vec<(&str, Vec<&str>)> = Vec::new();
    for line in body {
        if line.trim().is_empty() {
            continue;
        }
        if indent_of(line) == base || out.is_empty() {
            out.push((line.trim(), Vec::new()));
        } else {
            out.last_mut().unwrap().1.push(line.trim());
        }
    }
    out
}

fn joined(first: &str, rest: &[&str]) -> String {
    std::iter::once(first).chain(rest.iter().copied()).filter(|s| !s.is_empty()).collect::<Vec<_>>().join(" ")
}

fn dedent(body: &[&str]) -> String {
    let base = body.iter().filter(|l| !l.trim().is_empty()).map(|l| indent_of(l)).min().unwrap_or(0);
    body.iter().map(|l| if l.len() >= base { &l[base..] } else { l.trim() }).collect::<Vec<_>>().join("\n")
}

fn entry_regex(kind: Kind, numpy: bool) -> Option<&'static Regex> {
    match (kind, numpy) {
        (Kind::Params, false) => Some(&GOOGLE_PARAM),
        (Kind::Raises, false) => Some(&GOOGLE_RAISE),
        (Kind::Params, true) => Some(&NUMPY_PARAM),
        (Kind::Raises, true) => Some(&NUMPY_RAISE),
        _ => None,
    }
}

fn sections_valid(sections: &[Section<'_>], numpy: bool) -> bool {
    !sections.is_empty()
        && sections.iter().all(|s| {
            if s.body.iter().all(|l| l.trim().is_empty()) {
                return false;
            }
            match entry_regex(s.kind, numpy) {
                Some(re) => entries(&s.body).iter().all(|(head, _)| re.is_match(head)),
                None => true,
            }
        })
}

pub fn google_matches(text: &str) -> bool {
    sections_valid(&google_split(text).sections, false)
}

pub fn parse_google(text: &str) -> DocstringMetadata {
    let split = google_split(text);
    let mut b = Builder { description: split.description.iter().map(|s| s.to_string()).collect(), ..Default::default() };
    for s in &split.sections {
        match s.kind {
            Kind::Params => {
                for (head, rest) in entries(&s.body) {
                    match GOOGLE_PARAM.captures(head) {
                        Some(c) => b.param(&c[1], c.get(2).map(|m| m.as_str()), &joined(&c[3], &rest)),
                        None => b.unparsed(&joined(head, &rest)),
                    }
                }
            }
            Kind::Raises => {
                for (head, rest) in entries(&s.body) {
                    match GOOGLE_RAISE.captures(head) {
                        Some(c) => b.raise(&c[1], &joined(&c[2], &rest)),
                        None => b.unparsed(&joined(head, &rest)),
                    }
                }
            }
            Kind::Returns => {
                let body = dedent(&s.body);
                let flat = body.lines().map(str::trim).collect::<Vec<_>>().join(" ");
                match GOOGLE_RETURN_TYPE.captures(&flat) {
                    Some(c) => b.returns(Some(&c[1]), &c[2]),
                    None => b.returns(None, &flat),
                }
            }
            Kind::Other => b.other(&s.name.to_lowercase(), &dedent(&s.body)),
        }
    }
    b.finish(StyleId::Google)
}

fn numpy_split(text: &str) -> Split<'_> {
    let lines: Vec<&str> = text.lines().collect();
    let header_at = |i: usize| -> Option<(&'static str, Kind)> {
        let name = lines[i].trim();
        let under = lines.get(i + 1)?;
        if !UNDERLINE.is_match(under) || under.trim().len() != name.len() || indent_of(lines[i]) != indent_of(under) {
            return None;
        }
        NUMPY_SECTIONS.iter().find(|(n, _)| *n == name).copied()
    };
    let mut split = Split { description: Vec::new(), sections: Vec::new() };
    let mut i = 0;
    while i < lines.len() {
        let Some((name, kind)) = header_at(i) else {
            if split.sections.is_empty() {
                split.description.push(lines[i]);
            } else {
                split.sections.last_mut().unwrap().body.push(lines[i]);
            }
            i += 1;
            continue;
        };
        if let Some(last) = split.sections.last_mut() {
            trim_blank_tail(&mut last.body);
        }
        split.sections.push(Section { name, kind, body: Vec::new() });
        i += 2;
    }
    if let Some(last) = split.sections.last_mut() {
        trim_blank_tail(&mut last.body);
    }
    split
}

pub fn numpy_matches(text: &str) -> bool {
    sections_valid(&numpy_split(text).sections, true)
}

pub fn parse_numpy(text: &str) -> DocstringMetadata {
    let split = numpy_split(text);
    let mut b = Builder { description: split.description.iter().map(|s| s.to_string()).collect(), ..Default::default() };
    for s in &split.sections {
        match s.kind {
            Kind::Params => {
                for (head, rest) in entries(&s.body) {
                    match NUMPY_PARAM.captures(head) {
                        Some(c) => {
                            let desc = joined("", &rest);
                            for name in c[1].split(',') {
                                b.param(name.trim(), c.get(2).map(|m| m.as_str()), &desc);
                            }
                        }
                        None => b.unparsed(&joined(head, &rest)),
                    }
                }
            }
            Kind::Returns => {
                for (head, rest) in entries(&s.body) {
                    let desc = joined("", &rest);
                    match NUMPY_NAMED_RETURN.captures(head) {
                        Some(c) => b.returns(Some(&c[2]), &desc),
                        None => b.returns(Some(head), &desc),
                    }
                }
            }
            Kind::Raises => {
                for (head, rest) in entries(&s.body) {
                    match NUMPY_RAISE.captures(head) {
                        Some(c) => b.raise(&c[1], &joined("", &rest)),
                        None => b.unparsed(&joined(head, &rest)),
                    }
                }
            }
            Kind::Other => b.other(&s.name.to_lowercase(), &dedent(&s.body)),
        }
    }
    b.finish(StyleId::NumPy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn google_full() {
        let doc = "Fetch rows.\n\nLonger text.\n\nArgs:\n    table (str): Table name\n        spanning lines.\n    *keys: Keys.\n\nReturns:\n    dict[str, int]: Mapping.\n\nRaises:\n    IOError: On failure.\n\nExample:\n    >>> fetch('t')";
        assert!(google_matches(doc));
        let m = parse_google(doc);
        assert_eq!(m.description, "Fetch rows.\n\nLonger text.");
        assert_eq!(m.params.len(), 2);
        assert_eq!(m.params[0].description, "Table name spanning lines.");
        assert_eq!(m.params[1].name, "*keys");
        assert_eq!(m.returns.as_ref().unwrap().type_hint.as_deref(), Some("dict[str, int]"));
        assert_eq!(m.raises[0].exception, "IOError");
        assert_eq!(m.other_tags["example"], ">>> fetch('t')");
    }

    #[test]
    fn google_strictness() {
        assert!(!google_matches("Args:\n    this line is not an entry"));
        assert!(!google_matches("Args:\n"));
        assert!(!google_matches("Arguments: inline"));
        let m = parse_google("Do.\n\nArgs:\n    x (int): ok\n    broken entry here");
        assert_eq!(m.params.len(), 1);
        assert_eq!(m.other_tags["unparsed"], "broken entry here");
    }

    #[test]
    fn numpy_full() {
        let doc = "Compute.\n\nParameters\n----------\nx, y : int\n    Inputs.\nflag : bool, optional\n\nReturns\n-------\nint\n    The result.\n\nRaises\n------\nValueError\n    If bad.";
        assert!(numpy_matches(doc));
        assert!(!google_matches(doc));
        let m = parse_numpy(doc);
        assert_eq!(m.params.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(), ["x", "y", "flag"]);
        assert_eq!(m.params[2].type_hint.as_deref(), Some("bool, optional"));
        assert_eq!(m.returns.as_ref().unwrap().type_hint.as_deref(), Some("int"));
        assert_eq!(m.returns.as_ref().unwrap().description, "The result.");
        assert_eq!(m.raises[0].exception, "ValueError");
    }

    #[test]
    fn numpy_underline_must_match() {
        assert!(!numpy_matches("Parameters\n-----\nx : int"));
    }
}
