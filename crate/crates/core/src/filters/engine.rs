use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::config::LengthBounds;
use super::{remove, update, FilterConfig, FilterId};
use crate::language::LanguageId;
use crate::syntax::{tokenize_text, ExtractedUnit, InlineSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Keep,
    Drop(FilterId),
}

/// What the filters did to one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterTrace {
    pub key: String,
    pub language: LanguageId,
    pub applied: Vec<FilterId>,
    pub removed_by: Option<FilterId>,
    pub text_before: String,
    pub text_after: Option<String>,
}

impl FilterTrace {
    pub fn kept(&self) -> bool {
        self.removed_by.is_none()
    }
}

#[derive(Debug, Clone)]
pub enum CleanOutcome<T> {
    Kept(T, FilterTrace),
    Dropped(FilterTrace),
}

impl<T> CleanOutcome<T> {
    pub fn trace(&self) -> &FilterTrace {
        match self {
            CleanOutcome::Kept(_, t) | CleanOutcome::Dropped(t) => t,
        }
    }
}

/// Compiled filter configuration.
#[derive(Debug, Clone)]
pub struct FilterEngine {
    config: FilterConfig,
    tags: BTreeSet<String>,
}

impl Default for FilterEngine {
    fn default() -> Self {
        Self::new(FilterConfig::default())
    }
}

impl FilterEngine {
    pub fn new(config: FilterConfig) -> Self {
        let tags = config.metadata.tags.iter().map(|t| t.to_lowercase()).collect();
        FilterEngine { config, tags }
    }

    pub fn config(&self) -> &FilterConfig {
        &self.config
    }

    /// Runs the enabled update filters in order, repeating the chain until
    /// it settles; returns the text and the filters that changed it.
    pub fn apply_update(&self, docstring: &str) -> (String, Vec<FilterId>) {
        let mut text = update::normalize(docstring);
        let mut changed = [false; FilterId::UPDATE_ORDER.len()];
        loop {
            let before = text.clone();
            for (i, id) in FilterId::UPDATE_ORDER.into_iter().enumerate() {
                if !self.config.is_enabled(id) {
                    continue;
                }
                let next = update::apply_update(id, &text, &self.tags);
                if next != text {
                    changed[i] = true;
                    text = next;
                }
            }
            if text == before || text.len() >= before.len() {
                break;
            }
        }
        let applied = FilterId::UPDATE_ORDER.into_iter().zip(changed).filter(|(_, c)| *c).map(|(id, _)| id).collect();
        (text, applied)
    }

    pub fn apply_remove(&self, tokens: &[String], docstring: &str) -> Verdict {
        self.apply_remove_with(tokens, docstring, self.config.length)
    }

    pub fn apply_remove_with(&self, tokens: &[String], docstring: &str, bounds: LengthBounds) -> Verdict {
        match remove::first_removal(tokens, docstring, &self.config, bounds) {
            Some(id) => Verdict::Drop(id),
            None => Verdict::Keep,
        }
    }

    fn clean_text(&self, key: String, language: LanguageId, raw: &str, bounds: LengthBounds) -> (FilterTrace, Vec<String>) {
        let (text, applied) = self.apply_update(raw);
        let tokens = tokenize_text(&text);
        let verdict = self.apply_remove_with(&tokens, &text, bounds);
        let (removed_by, text_after) = match verdict {
            Verdict::Keep => (None, Some(text)),
            Verdict::Drop(id) => (Some(id), None),
        };
        let trace = FilterTrace { key, language, applied, removed_by, text_before: raw.to_string(), text_after };
        (trace, tokens)
    }

    /// Cleans a unit's docstring. Units without one are dropped as empty.
    pub fn clean_pair(&self, unit: &ExtractedUnit) -> CleanOutcome<ExtractedUnit> {
        let raw = unit.docstring_raw.as_deref().unwrap_or("");
        let (trace, tokens) = self.clean_text(unit.key(), unit.language, raw, self.config.length);
        match &trace.text_after {
            Some(text) => {
                let mut cleaned = unit.clone();
                cleaned.docstring_raw = Some(text.clone());
                cleaned.docstring_tokens = Some(tokens);
                CleanOutcome::Kept(cleaned, trace)
            }
            None => CleanOutcome::Dropped(trace),
        }
    }

    /// Cleans an inline comment using the inline length bounds.
    pub fn clean_inline(&self, sample: &InlineSample) -> CleanOutcome<InlineSample> {
        let (trace, tokens) = self.clean_text(sample.key(), sample.language, &sample.comment, self.config.inline_length);
        match &trace.text_after {
            Some(text) => {
                let mut cleaned = sample.clone();
                cleaned.comment = text.clone();
                cleaned.comment_tokens = tokens;
                CleanOutcome::Kept(cleaned, trace)
            }
            None => CleanOutcome::Dropped(trace),
        }
    }
}

/// [`FilterEngine::apply_update`] with the default configuration.
pub fn apply_update_filters(docstring: &str) -> (String, Vec<FilterId>) {
    default_engine().apply_update(docstring)
}

/// [`FilterEngine::apply_remove`] with the default configuration.
pub fn apply_remove_filters(tokens: &[String], docstring: &str) -> Verdict {
    default_engine().apply_remove(tokens, docstring)
}

fn default_engine() -> &'static FilterEngine {
    static ENGINE: std::sync::LazyLock<FilterEngine> = std::sync::LazyLock::new(FilterEngine::default);
    &ENGINE
}
