//! Code tokens are the leaves of the syntax tree; text tokens are words and
//! single punctuation characters.

use tree_sitter::Node;

use crate::language::LanguageId;

use super::grammar::{grammar, ATOMIC_KINDS};
use super::tree::parse_source;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CodeTokens {
    pub tokens: Vec<String>,
    /// Set when the fragment did not parse and lexical splitting was used.
    pub fallback: bool,
}

/// Collect leaf tokens of `node` in source order. Comment subtrees and any
/// node in `exclude` (e.g. a Python docstring) are skipped.
pub(crate) fn leaf_tokens(node: Node<'_>, source: &str, language: LanguageId, exclude: &[(usize, usize)], out: &mut Vec<String>) {
    let g = grammar(language);
    let mut stack = vec![node];
    while let Some(n) = stack.pop() {
        if g.is_comment(n.kind()) || n.is_missing() {
            continue;
        }
        let span = (n.start_byte(), n.end_byte());
        if exclude.contains(&span) && span != (node.start_byte(), node.end_byte()) {
            continue;
        }
        if n.child_count() == 0 || (n.is_named() && ATOMIC_KINDS.contains(&n.kind())) {
            let text = &source[n.start_byte()..n.end_byte()];
            if !text.trim().is_empty() {
                out.push(text.to_string());
            }
            continue;
        }
        let mut cursor = n.walk();
        let children: Vec<Node<'_>> = n.children(&mut cursor).collect();
        stack.extend(children.into_iter().rev());
    }
}

/// Tokenize a standalone code fragment. Falls back to whitespace and
/// punctuation splitting when the fragment does not parse cleanly.
pub fn tokenize_code(code: &str, language: LanguageId) -> CodeTokens {
    if code.trim().is_empty() {
        return CodeTokens::default();
    }
    match parse_source(code, language, true) {
        Ok(tree) if !tree.has_errors() => {
            let mut tokens = Vec::new();
            leaf_tokens(tree.root(), code, language, &[], &mut tokens);
            CodeTokens { tokens, fallback: false }
        }
        _ => CodeTokens {
            tokens: tokenize_text(code),
            fallback: true,
        },
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Split on whitespace, then emit every non-word character as its own token.
pub fn tokenize_text(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if is_word_char(c) {
            word.push(c);
            continue;
        }
        if !word.is_empty() {
            tokens.push(std::mem::take(&mut word));
        }
        if !c.is_whitespace() {
            tokens.push(c.to_string());
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}
