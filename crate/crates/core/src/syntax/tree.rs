use std::cell::RefCell;
use std::collections::HashMap;

use tree_sitter::{Node, Parser, Tree};

use crate::error::{Error, Result};
use crate::ingest::RawSourceFile;
use crate::language::LanguageId;

use super::grammar::{file_language, fragment_language};

/// Files where at least this share of non-whitespace bytes sits inside
/// `ERROR` nodes are rejected as unparseable.
pub const MAX_ERROR_COVERAGE: f64 = 0.5;

thread_local! {
    static PARSERS: RefCell<HashMap<(LanguageId, bool), Parser>> = RefCell::new(HashMap::new());
}

fn with_parser<T>(lang: LanguageId, fragment: bool, f: impl FnOnce(&mut Parser) -> T) -> Result<T> {
    PARSERS.with(|cell| {
        let mut parsers = cell.borrow_mut();
        if let std::collections::hash_map::Entry::Vacant(slot) = parsers.entry((lang, fragment)) {
            let mut parser = Parser::new();
            let grammar = if fragment { fragment_language(lang) } else { file_language(lang) };
            parser
                .set_language(&grammar)
                .map_err(|e| Error::GrammarUnavailable(format!("{lang}: {e}")))?;
            slot.insert(parser);
        }
        let parser = parsers.get_mut(&(lang, fragment)).expect("parser inserted above");
        Ok(f(parser))
    })
}

/// A parsed file. Wraps the concrete syntax tree; node access goes through
/// tree-sitter's [`Node`] API.
pub struct SyntaxTree {
    tree: Tree,
    language: LanguageId,
    error_bytes: usize,
}

impl std::fmt::Debug for SyntaxTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SyntaxTree")
            .field("language", &self.language)
            .field("root", &self.root().kind())
            .field("error_bytes", &self.error_bytes)
            .finish()
    }
}

impl SyntaxTree {
    pub fn root(&self) -> Node<'_> {
        self.tree.root_node()
    }

    pub fn language(&self) -> LanguageId {
        self.language
    }

    pub fn has_errors(&self) -> bool {
        self.root().has_error()
    }

    /// Bytes covered by outermost `ERROR` nodes.
    pub fn error_bytes(&self) -> usize {
        self.error_bytes
    }

    pub fn to_sexp(&self) -> String {
        self.root().to_sexp()
    }
}

fn count_error_bytes(node: Node<'_>) -> usize {
    if node.is_error() {
        return node.end_byte() - node.start_byte();
    }
    if !node.has_error() {
        return 0;
    }
    let mut cursor = node.walk();
    node.children(&mut cursor).map(count_error_bytes).sum()
}

pub(crate) fn parse_source(source: &str, language: LanguageId, fragment: bool) -> Result<SyntaxTree> {
    let tree = with_parser(language, fragment, |p| p.parse(source, None))?
        .ok_or_else(|| Error::Parse("parser returned no tree".into()))?;
    let error_bytes = count_error_bytes(tree.root_node());
    Ok(SyntaxTree {
        tree,
        language,
        error_bytes,
    })
}

/// Parse a whole file. Trees that are mostly error recovery are rejected.
pub fn parse_file(file: &RawSourceFile) -> Result<SyntaxTree> {
    let tree = parse_source(&file.content, file.language, false)?;
    let significant = file.content.bytes().filter(|b| !b.is_ascii_whitespace()).count();
    let root = tree.root();
    if root.is_error() {
        return Err(Error::Parse(format!("{}/{}: root is an error node", file.repo_id, file.rel_path)));
    }
    if significant > 0 && tree.error_bytes() as f64 >= MAX_ERROR_COVERAGE * significant as f64 {
        return Err(Error::Parse(format!(
            "{}/{}: {} of {} bytes inside error nodes",
            file.repo_id,
            file.rel_path,
            tree.error_bytes(),
            significant
        )));
    }
    Ok(tree)
}
