//! Syntax-tree based extraction of code units, docstrings and inline comments.

mod extract;
mod grammar;
mod tokenize;
mod tree;

pub use extract::{
    extract_inline_blocks, extract_units, DropReason, DroppedUnit, ExtractedUnit, InlineExtraction,
    InlineSample, UnitExtraction, UnitKind, INLINE_MAX_TOKENS, INLINE_MIN_TOKENS, MAX_CLASS_CODE_TOKENS,
};
pub use tokenize::{tokenize_code, tokenize_text, CodeTokens};
pub use tree::{parse_file, SyntaxTree, MAX_ERROR_COVERAGE};

use crate::ingest::RawSourceFile;

/// Everything extracted from one file.
#[derive(Debug, Clone, Default)]
pub struct FileExtraction {
    pub units: UnitExtraction,
    pub inline: InlineExtraction,
}

/// Parse and extract a file in one step. Pure and independent per file, so
/// callers may map it over files in parallel.
pub fn extract_file(file: &RawSourceFile) -> crate::Result<FileExtraction> {
    let tree = parse_file(file)?;
    Ok(FileExtraction {
        units: extract_units(&tree, file),
        inline: extract_inline_blocks(&tree, file),
    })
}
