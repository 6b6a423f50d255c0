//! Output record schemas. Every JSONL row carries `"schema": 1`.

use serde::{Deserialize, Serialize};

use crate::dedup::Split;
use crate::docstring::DocstringMetadata;
use crate::language::LanguageId;
use crate::syntax::{ExtractedUnit, InlineSample, UnitKind};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// A `D_paired` or `D_unimodal` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRecord {
    #[serde(default = "schema_version")]
    pub schema: u32,
    pub key: String,
    pub repo: String,
    pub path: String,
    pub language: LanguageId,
    pub kind: UnitKind,
    pub identifier: String,
    pub code: String,
    pub code_span: (usize, usize),
    pub code_tokens: Vec<String>,
    pub docstring: Option<String>,
    pub docstring_tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub docstring_params: Option<DocstringMetadata>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistency_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subsets: Vec<String>,
}

impl UnitRecord {
    /// Unimodal row: code only.
    pub fn unimodal(u: &ExtractedUnit) -> Self {
        UnitRecord {
            schema: SCHEMA_VERSION,
            key: u.key(),
            repo: u.repo_id.clone(),
            path: u.rel_path.clone(),
            language: u.language,
            kind: u.kind,
            identifier: u.identifier.clone(),
            code: u.code.clone(),
            code_span: u.code_span,
            code_tokens: u.code_tokens.clone(),
            docstring: None,
            docstring_tokens: None,
            docstring_params: None,
            consistency_score: None,
            split: None,
            subsets: Vec::new(),
        }
    }

    /// Paired row from a cleaned unit.
    pub fn paired(u: &ExtractedUnit, meta: DocstringMetadata) -> Self {
        UnitRecord {
            docstring: u.docstring_raw.clone(),
            docstring_tokens: u.docstring_tokens.clone(),
            docstring_params: Some(meta),
            ..UnitRecord::unimodal(u)
        }
    }
}

/// A `D_block` row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    #[serde(default = "schema_version")]
    pub schema: u32,
    pub key: String,
    pub repo: String,
    pub path: String,
    pub language: LanguageId,
    pub comment: String,
    pub comment_tokens: Vec<String>,
    pub prev_context: String,
    pub next_context: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enclosing_identifier: Option<String>,
}

impl From<&InlineSample> for BlockRecord {
    fn from(s: &InlineSample) -> Self {
        BlockRecord {
            schema: SCHEMA_VERSION,
            key: s.key(),
            repo: s.repo_id.clone(),
            path: s.rel_path.clone(),
            language: s.language,
            comment: s.comment.clone(),
            comment_tokens: s.comment_tokens.clone(),
            prev_context: s.prev_context.clone(),
            next_context: s.next_context.clone(),
            enclosing_identifier: s.enclosing_identifier.clone(),
        }
    }
}

/// One `split_manifest.jsonl` row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRow {
    #[serde(default = "schema_version")]
    pub schema: u32,
    pub key: String,
    pub split: Split,
    pub subsets: Vec<String>,
    pub repo: String,
}

/// One `dedup_report.jsonl` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupRow {
    #[serde(default = "schema_version")]
    pub schema: u32,
    pub corpus_key: String,
    pub holdout_key: String,
    pub est_jaccard: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unimodal_omits_metadata() {
        let u = ExtractedUnit {
            repo_id: "r".into(),
            rel_path: "a.py".into(),
            language: LanguageId::Python,
            kind: UnitKind::Function,
            identifier: "f".into(),
            code: "def f(): pass".into(),
            code_span: (0, 13),
            docstring_raw: None,
            code_tokens: vec!["def".into()],
            docstring_tokens: None,
        };
        let v = serde_json::to_value(UnitRecord::unimodal(&u)).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["docstring"], serde_json::Value::Null);
        assert!(v.get("docstring_params").is_none());
        assert!(v.get("split").is_none());
        assert_eq!(v["key"], "r/a.py:0-13");
    }
}
