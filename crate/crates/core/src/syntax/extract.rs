//! Breadth-first extraction of functions, classes and inline comments.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use tree_sitter::Node;

use crate::ingest::RawSourceFile;
use crate::language::LanguageId;

use super::grammar::{grammar, DocPlacement, Grammar};
use super::tokenize::{leaf_tokens, tokenize_text};
use super::tree::SyntaxTree;
use crate::filters::update::strip_delimiters;

/// Class units above this many code tokens are dropped.
pub const MAX_CLASS_CODE_TOKENS: usize = 5000;
/// Inline comments must have between these many tokens (inclusive).
pub const INLINE_MIN_TOKENS: usize = 3;
pub const INLINE_MAX_TOKENS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    Function,
    Class,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedUnit {
    pub repo_id: String,
    pub rel_path: String,
    pub language: LanguageId,
    pub kind: UnitKind,
    pub identifier: String,
    pub code: String,
    pub code_span: (usize, usize),
    pub docstring_raw: Option<String>,
    pub code_tokens: Vec<String>,
    pub docstring_tokens: Option<Vec<String>>,
}

impl ExtractedUnit {
    /// Stable sample key: `repo/path:start-end`.
    pub fn key(&self) -> String {
        format!("{}/{}:{}-{}", self.repo_id, self.rel_path, self.code_span.0, self.code_span.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InlineSample {
    pub repo_id: String,
    pub rel_path: String,
    pub language: LanguageId,
    pub comment: String,
    pub comment_tokens: Vec<String>,
    pub prev_context: String,
    pub next_context: String,
    pub enclosing_identifier: Option<String>,
    pub comment_span: (usize, usize),
}

impl InlineSample {
    pub fn key(&self) -> String {
        format!("{}/{}:{}-{}", self.repo_id, self.rel_path, self.comment_span.0, self.comment_span.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DropReason {
    #[serde(rename = "class-token-limit")]
    ClassTokenLimit,
    #[serde(rename = "inline-token-bounds")]
    InlineTokenBounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedUnit {
    pub key: String,
    pub identifier: String,
    pub kind: UnitKind,
    pub reason: DropReason,
}

#[derive(Debug, Clone, Default)]
pub struct UnitExtraction {
    pub units: Vec<ExtractedUnit>,
    pub dropped: Vec<DroppedUnit>,
}

#[derive(Debug, Clone, Default)]
pub struct InlineExtraction {
    pub samples: Vec<InlineSample>,
    /// Comment runs whose token count fell outside the inline bounds.
    pub out_of_bounds: usize,
}

fn text<'s>(node: Node<'_>, src: &'s str) -> &'s str {
    &src[node.start_byte()..node.end_byte()]
}

/// Row of the last character of `node`, ignoring a trailing newline that some
/// grammars fold into line comments.
fn last_row(node: Node<'_>, src: &str) -> usize {
    let end = node.end_position();
    if end.column == 0 && end.row > node.start_position().row && text(node, src).ends_with('\n') {
        end.row - 1
    } else {
        end.row
    }
}

fn is_line_comment(t: &str) -> bool {
    let t = t.trim_start();
    t.starts_with("//") || t.starts_with('#')
}

enum UnitRole {
    Function,
    Class,
}

fn unit_role(node: Node<'_>, g: &Grammar, lang: LanguageId) -> Option<UnitRole> {
    if !node.is_named() {
        return None;
    }
    let kind = node.kind();
    if g.function_kinds.contains(&kind) {
        if lang == LanguageId::JavaScript && kind == "arrow_function" {
            // Only named arrow functions are units; callbacks are not.
            return match node.parent() {
                Some(p) if p.kind() == "variable_declarator" => Some(UnitRole::Function),
                _ => None,
            };
        }
        return Some(UnitRole::Function);
    }
    if g.class_kinds.contains(&kind) {
        if lang == LanguageId::Cpp && node.child_by_field_name("body").is_none() {
            return None;
        }
        return Some(UnitRole::Class);
    }
    None
}

fn c_declarator_name(mut node: Node<'_>, src: &str) -> Option<String> {
    loop {
        match node.kind() {
            "identifier" | "field_identifier" | "qualified_identifier" | "destructor_name" | "operator_name"
            | "template_function" => return Some(text(node, src).to_string()),
            _ => {
                node = node
                    .child_by_field_name("declarator")
                    .or_else(|| node.named_child(0))?;
            }
        }
    }
}

fn unit_name(node: Node<'_>, lang: LanguageId, src: &str) -> Option<String> {
    if matches!(lang, LanguageId::C | LanguageId::Cpp) && node.kind() == "function_definition" {
        return node
            .child_by_field_name("declarator")
            .and_then(|d| c_declarator_name(d, src));
    }
    if let Some(name) = node.child_by_field_name("name") {
        return Some(text(name, src).to_string());
    }
    let parent = node.parent()?;
    let named = match parent.kind() {
        "variable_declarator" => parent.child_by_field_name("name"),
        "pair" => parent.child_by_field_name("key"),
        "assignment_expression" => parent.child_by_field_name("left"),
        _ => None,
    }?;
    Some(text(named, src).to_string())
}

/// The node whose preceding siblings may hold the doc comment.
fn attachment_anchor<'t>(node: Node<'t>, g: &Grammar) -> Node<'t> {
    let mut anchor = node;
    while let Some(p) = anchor.parent() {
        if g.wrapper_kinds.contains(&p.kind()) {
            anchor = p;
        } else {
            break;
        }
    }
    anchor
}

/// Comment block directly above `node`: the nearest comment whose last line
/// is at most one line above the definition, extended upwards over adjacent
/// line comments.
fn preceding_comment(node: Node<'_>, g: &Grammar, src: &str) -> Option<(usize, usize)> {
    let anchor = attachment_anchor(node, g);
    let mut boundary_row = anchor.start_position().row;
    let mut sib = anchor.prev_sibling();
    if sib.is_none() {
        // First statement of a body whose leading comments hang off the
        // enclosing definition (Ruby).
        sib = anchor.parent().filter(|p| g.is_container(p.kind())).and_then(|p| p.prev_sibling());
    }
    while let Some(s) = sib {
        if g.passthrough_kinds.contains(&s.kind()) {
            boundary_row = s.start_position().row;
            sib = s.prev_sibling();
        } else {
            break;
        }
    }
    let mut first = sib.filter(|s| g.is_comment(s.kind()))?;
    if last_row(first, src) + 1 < boundary_row || is_trailing(first, g, src) {
        return None;
    }
    let last = first;
    if is_line_comment(text(first, src)) {
        while let Some(prev) = first.prev_sibling() {
            if !g.is_comment(prev.kind())
                || !is_line_comment(text(prev, src))
                || last_row(prev, src) + 1 < first.start_position().row
                || is_trailing(prev, g, src)
            {
                break;
            }
            first = prev;
        }
    }
    Some((first.start_byte(), last.end_byte()))
}

/// A comment that shares its first line with preceding code.
fn is_trailing(comment: Node<'_>, g: &Grammar, src: &str) -> bool {
    match comment.prev_sibling() {
        Some(prev) if !g.is_comment(prev.kind()) => last_row(prev, src) == comment.start_position().row,
        _ => false,
    }
}

/// Leading string-literal statement of a Python body.
fn body_literal(node: Node<'_>) -> Option<Node<'_>> {
    let body = node.child_by_field_name("body")?;
    let first = body.named_child(0)?;
    if first.kind() != "expression_statement" || first.named_child_count() != 1 {
        return None;
    }
    let lit = first.named_child(0)?;
    matches!(lit.kind(), "string" | "concatenated_string").then_some(lit)
}

/// Leading comment block at the top of a Ruby body (comments may attach to
/// the definition node itself, ahead of `body`).
fn body_leading_comment(node: Node<'_>, g: &Grammar, src: &str) -> Option<(usize, usize)> {
    let header_end = node
        .child_by_field_name("parameters")
        .or_else(|| node.child_by_field_name("name"))
        .map(|n| n.end_byte())?;
    let mut cursor = node.walk();
    let mut candidates: Vec<Node<'_>> = node
        .children(&mut cursor)
        .filter(|c| c.start_byte() >= header_end && g.is_comment(c.kind()))
        .collect();
    if candidates.is_empty() {
        if let Some(body) = node.child_by_field_name("body") {
            let mut c2 = body.walk();
            candidates = body
                .children(&mut c2)
                .take_while(|c| g.is_comment(c.kind()))
                .collect();
        }
    }
    let first = *candidates.first()?;
    let mut last = first;
    for c in candidates.iter().skip(1) {
        if c.start_position().row > last_row(last, src) + 1 {
            break;
        }
        last = *c;
    }
    // A block sitting right on top of a nested definition documents that
    // definition, not this one.
    let mut next = last.next_sibling();
    while let Some(n) = next.filter(|n| g.is_comment(n.kind()) || g.is_container(n.kind())) {
        next = if g.is_comment(n.kind()) { n.next_sibling() } else { n.named_child(0) };
    }
    if let Some(n) = next {
        let is_unit = g.function_kinds.contains(&n.kind()) || g.class_kinds.contains(&n.kind());
        if is_unit && n.start_position().row <= last_row(last, src) + 1 {
            return None;
        }
    }
    Some((first.start_byte(), last.end_byte()))
}

fn docstring_span(node: Node<'_>, g: &Grammar, src: &str) -> Option<(usize, usize)> {
    match g.doc_placement {
        DocPlacement::BodyLiteral => body_literal(node).map(|n| (n.start_byte(), n.end_byte())),
        DocPlacement::Preceding => preceding_comment(node, g, src),
        DocPlacement::PrecedingThenBody => {
            preceding_comment(node, g, src).or_else(|| body_leading_comment(node, g, src))
        }
    }
}

/// Extract function and class units by breadth-first traversal from the root.
/// Units nested at any depth are emitted independently.
pub fn extract_units(tree: &SyntaxTree, file: &RawSourceFile) -> UnitExtraction {
    let lang = file.language;
    let g = grammar(lang);
    let src = file.content.as_str();
    let mut out = UnitExtraction::default();
    let mut queue = VecDeque::from([tree.root()]);

    while let Some(node) = queue.pop_front() {
        if node.is_error() {
            continue;
        }
        let mut cursor = node.walk();
        queue.extend(node.children(&mut cursor));

        let Some(role) = unit_role(node, g, lang) else { continue };
        if node.has_error() {
            continue;
        }
        let kind = match role {
            UnitRole::Function => UnitKind::Function,
            UnitRole::Class => UnitKind::Class,
        };
        let code_span = (node.start_byte(), node.end_byte());
        let identifier = unit_name(node, lang, src)
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| format!("<anonymous:{}>", node.start_position().row + 1));
        let doc_span = docstring_span(node, g, src);
        let exclude: Vec<(usize, usize)> = doc_span.into_iter().collect();
        let mut code_tokens = Vec::new();
        leaf_tokens(node, src, lang, &exclude, &mut code_tokens);

        let unit = ExtractedUnit {
            repo_id: file.repo_id.clone(),
            rel_path: file.rel_path.clone(),
            language: lang,
            kind,
            identifier,
            code: src[code_span.0..code_span.1].to_string(),
            code_span,
            docstring_raw: doc_span.map(|(s, e)| src[s..e].to_string()),
            docstring_tokens: doc_span.map(|(s, e)| tokenize_text(&strip_delimiters(&src[s..e]))),
            code_tokens,
        };
        if kind == UnitKind::Class && unit.code_tokens.len() > MAX_CLASS_CODE_TOKENS {
            out.dropped.push(DroppedUnit {
                key: unit.key(),
                identifier: unit.identifier,
                kind,
                reason: DropReason::ClassTokenLimit,
            });
            continue;
        }
        out.units.push(unit);
    }
    out
}

/// One entry in a statement container: either a code node or a comment run.
enum Item<'t> {
    Code(Node<'t>),
    Comments(Vec<Node<'t>>),
}

/// Extract line comments inside function bodies together with the code
/// before and after them in the same statement list.
pub fn extract_inline_blocks(tree: &SyntaxTree, file: &RawSourceFile) -> InlineExtraction {
    let lang = file.language;
    let g = grammar(lang);
    let src = file.content.as_str();
    let mut out = InlineExtraction::default();

    let mut queue = VecDeque::from([tree.root()]);
    while let Some(node) = queue.pop_front() {
        if node.is_error() {
            continue;
        }
        let mut cursor = node.walk();
        queue.extend(node.children(&mut cursor));
        if !matches!(unit_role(node, g, lang), Some(UnitRole::Function)) || node.has_error() {
            continue;
        }
        let Some(body) = node.child_by_field_name("body") else { continue };
        let identifier = unit_name(node, lang, src);
        let doc_span = docstring_span(node, g, src);
        for container in containers_in(node, body, g, lang) {
            collect_container(container, node, g, src, doc_span, file, identifier.as_deref(), &mut out);
        }
    }
    out
}

/// Statement containers belonging to `func`, without descending into nested
/// units (they produce their own samples).
fn containers_in<'t>(func: Node<'t>, body: Node<'t>, g: &Grammar, lang: LanguageId) -> Vec<Node<'t>> {
    let mut found = Vec::new();
    let mut stack = vec![body];
    while let Some(n) = stack.pop() {
        if n.id() != func.id() && unit_role(n, g, lang).is_some() {
            continue;
        }
        if n.id() == body.id() || g.is_container(n.kind()) {
            found.push(n);
        }
        let mut cursor = n.walk();
        let children: Vec<Node<'t>> = n.children(&mut cursor).collect();
        stack.extend(children.into_iter().rev());
    }
    // A body that is not itself a container (e.g. Go `block`) contributes
    // only through its nested containers and hoisted comments.
    found.sort_by_key(|n| n.start_byte());
    found
}

/// Comments that are children of a non-container parent are hoisted into the
/// container that follows (or precedes) them.
fn hoisted_comments<'t>(container: Node<'t>, g: &Grammar) -> (Vec<Node<'t>>, Vec<Node<'t>>) {
    let mut before = Vec::new();
    let mut after = Vec::new();
    let Some(parent) = container.parent() else { return (before, after) };
    if g.is_container(parent.kind()) {
        return (before, after);
    }
    let mut sib = container.prev_sibling();
    while let Some(s) = sib.filter(|s| g.is_comment(s.kind())) {
        before.push(s);
        sib = s.prev_sibling();
    }
    before.reverse();
    let mut sib = container.next_sibling();
    while let Some(s) = sib.filter(|s| g.is_comment(s.kind())) {
        // Only trailing comments that have no container after them.
        after.push(s);
        sib = s.next_sibling();
    }
    if sib.is_some_and(|s| g.is_container(s.kind())) {
        after.clear();
    }
    (before, after)
}

#[allow(clippy::too_many_arguments)]
fn collect_container(
    container: Node<'_>,
    func: Node<'_>,
    g: &Grammar,
    src: &str,
    doc_span: Option<(usize, usize)>,
    file: &RawSourceFile,
    identifier: Option<&str>,
    out: &mut InlineExtraction,
) {
    let (before, after) = if container.id() == func.child_by_field_name("body").map(|b| b.id()).unwrap_or(usize::MAX)
        && !g.is_container(container.kind())
    {
        // Non-container body (e.g. Go block): only its direct comments matter
        // when it holds no statement list.
        let mut cursor = container.walk();
        let has_inner = container.named_children(&mut cursor).any(|c| g.is_container(c.kind()));
        if has_inner {
            return;
        }
        (Vec::new(), Vec::new())
    } else {
        hoisted_comments(container, g)
    };

    let mut cursor = container.walk();
    let mut nodes: Vec<Node<'_>> = before;
    nodes.extend(container.named_children(&mut cursor));
    nodes.extend(after);

    let mut items: Vec<Item<'_>> = Vec::new();
    for n in nodes {
        if doc_span.is_some_and(|d| d.0 <= n.start_byte() && n.end_byte() <= d.1) {
            continue;
        }
        if n.kind() == "expression_statement" && doc_span.is_some_and(|d| n.start_byte() <= d.0 && d.1 <= n.end_byte()) {
            continue;
        }
        if g.is_comment(n.kind()) {
            let line = is_line_comment(text(n, src));
            match items.last_mut() {
                Some(Item::Comments(run))
                    if line
                        && is_line_comment(text(*run.last().unwrap(), src))
                        && n.start_position().row <= last_row(*run.last().unwrap(), src) + 1 =>
                {
                    run.push(n)
                }
                _ => items.push(Item::Comments(vec![n])),
            }
        } else {
            items.push(Item::Code(n));
        }
    }

    for (idx, item) in items.iter().enumerate() {
        let Item::Comments(run) = item else { continue };
        if !is_line_comment(text(run[0], src)) {
            continue;
        }
        let prev: Vec<Node<'_>> = items[..idx]
            .iter()
            .rev()
            .take_while(|i| matches!(i, Item::Code(_)))
            .filter_map(|i| match i {
                Item::Code(n) => Some(*n),
                Item::Comments(_) => None,
            })
            .collect();
        let next: Vec<Node<'_>> = items[idx + 1..]
            .iter()
            .take_while(|i| matches!(i, Item::Code(_)))
            .filter_map(|i| match i {
                Item::Code(n) => Some(*n),
                Item::Comments(_) => None,
            })
            .collect();
        let prev_context = match (prev.last(), prev.first()) {
            (Some(first), Some(last)) => src[first.start_byte()..last.end_byte()].to_string(),
            _ => String::new(),
        };
        let next_context = match (next.first(), next.last()) {
            (Some(first), Some(last)) => src[first.start_byte()..last.end_byte()].to_string(),
            _ => String::new(),
        };
        if prev_context.is_empty() && next_context.is_empty() {
            continue;
        }
        let comment = run
            .iter()
            .map(|c| strip_delimiters(text(*c, src)))
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        let comment_tokens = tokenize_text(&comment);
        if !(INLINE_MIN_TOKENS..=INLINE_MAX_TOKENS).contains(&comment_tokens.len()) {
            out.out_of_bounds += 1;
            continue;
        }
        out.samples.push(InlineSample {
            repo_id: file.repo_id.clone(),
            rel_path: file.rel_path.clone(),
            language: file.language,
            comment,
            comment_tokens,
            prev_context,
            next_context,
            enclosing_identifier: identifier.map(str::to_string),
            comment_span: (run[0].start_byte(), run.last().unwrap().end_byte()),
        });
    }
}
