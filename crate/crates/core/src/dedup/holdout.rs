use std::io::BufRead;
use std::path::Path;

use serde_json::Value;

use super::HoldoutRecord;
use crate::error::{Error, Result};
use crate::io::{open_reader, JsonlWriter};
use crate::language::LanguageId;
use crate::syntax::tokenize_code;

/// Where to find each holdout field in a benchmark row.
#[derive(Debug, Clone)]
pub struct FieldMap {
    pub key: String,
    pub code: String,
    /// Field holding the language name; `language` is used when absent.
    pub language_field: Option<String>,
    pub language: Option<LanguageId>,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap { key: "key".into(), code: "code".into(), language_field: None, language: None }
    }
}

fn field_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Tokenize benchmark code into `{key, code_tokens}` rows.
pub fn export_holdout(input: &Path, output: &Path, map: &FieldMap) -> Result<usize> {
    if map.language_field.is_none() && map.language.is_none() {
        return Err(Error::Config("holdout export needs a language or a language field".into()));
    }
    let reader = open_reader(input)?;
    let mut rows = Vec::new();
    let mut missing: Vec<String> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(input, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&line).map_err(|e| Error::Record {
            path: input.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        let get = |f: &str| v.get(f).and_then(field_text);
        let key = get(&map.key);
        let code = get(&map.code);
        let lang = match &map.language_field {
            Some(f) => get(f).and_then(|s| s.parse::<LanguageId>().ok()).or(map.language),
            None => map.language,
        };
        let mut absent: Vec<&str> = Vec::new();
        if key.is_none() {
            absent.push(&map.key);
        }
        if code.is_none() {
            absent.push(&map.code);
        }
        if lang.is_none() {
            absent.push(map.language_field.as_deref().unwrap_or("language"));
        }
        if !absent.is_empty() {
            missing.push(format!("line {}: {}", idx + 1, absent.join(", ")));
            continue;
        }
        let (key, code, lang) = (key.unwrap(), code.unwrap(), lang.unwrap());
        rows.push(HoldoutRecord { key, code_tokens: tokenize_code(&code, lang).tokens });
    }
    if !missing.is_empty() {
        return Err(Error::Config(format!("unmapped holdout fields: {}", missing.join("; "))));
    }
    let mut w = JsonlWriter::create(output)?;
    for r in &rows {
        w.write(r)?;
    }
    w.finish()
}
