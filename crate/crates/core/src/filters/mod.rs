//! Rule-based docstring cleaning.
//!
//! Update filters rewrite the text in place; remove filters drop the sample.
//! [`FilterEngine`] composes both and records a [`FilterTrace`] per sample.

mod config;
mod engine;
pub mod langid;
pub mod remove;
mod report;
pub mod update;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use config::{AutogenCatalog, FilterConfig, LanguageIdConfig, LengthBounds, MetadataCatalog, WipCatalog};
pub use engine::{apply_remove_filters, apply_update_filters, CleanOutcome, FilterEngine, FilterTrace, Verdict};
pub use report::{filter_report, FilterReport, FilterRow, FilterStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FilterId {
    StripDelimiters,
    StripHyperlink,
    StripEmbeddedCode,
    StripMathFormulas,
    StripMetadataTags,
    StripHtmlTags,
    HandleExamplesNotes,
    HandleQuestions,
    RemoveEmpty,
    RemoveBadLength,
    RemoveNonEnglish,
    RemoveAutoGen,
    RemoveWip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Update,
    Remove,
}

impl FilterId {
    pub const ALL: [FilterId; 13] = [
        FilterId::StripDelimiters,
        FilterId::StripHyperlink,
        FilterId::StripEmbeddedCode,
        FilterId::StripMathFormulas,
        FilterId::StripMetadataTags,
        FilterId::StripHtmlTags,
        FilterId::HandleExamplesNotes,
        FilterId::HandleQuestions,
        FilterId::RemoveEmpty,
        FilterId::RemoveBadLength,
        FilterId::RemoveNonEnglish,
        FilterId::RemoveAutoGen,
        FilterId::RemoveWip,
    ];

    /// Update filters in application order.
    pub const UPDATE_ORDER: [FilterId; 8] = [
        FilterId::StripDelimiters,
        FilterId::StripHyperlink,
        FilterId::StripEmbeddedCode,
        FilterId::StripMathFormulas,
        FilterId::StripMetadataTags,
        FilterId::StripHtmlTags,
        FilterId::HandleExamplesNotes,
        FilterId::HandleQuestions,
    ];

    /// Remove filters in application order.
    pub const REMOVE_ORDER: [FilterId; 5] = [
        FilterId::RemoveEmpty,
        FilterId::RemoveBadLength,
        FilterId::RemoveNonEnglish,
        FilterId::RemoveAutoGen,
        FilterId::RemoveWip,
    ];

    pub fn action(self) -> Action {
        if Self::REMOVE_ORDER.contains(&self) {
            Action::Remove
        } else {
            Action::Update
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FilterId::StripDelimiters => "StripDelimiters",
            FilterId::StripHyperlink => "StripHyperlink",
            FilterId::StripEmbeddedCode => "StripEmbeddedCode",
            FilterId::StripMathFormulas => "StripMathFormulas",
            FilterId::StripMetadataTags => "StripMetadataTags",
            FilterId::StripHtmlTags => "StripHtmlTags",
            FilterId::HandleExamplesNotes => "HandleExamplesNotes",
            FilterId::HandleQuestions => "HandleQuestions",
            FilterId::RemoveEmpty => "RemoveEmpty",
            FilterId::RemoveBadLength => "RemoveBadLength",
            FilterId::RemoveNonEnglish => "RemoveNonEnglish",
            FilterId::RemoveAutoGen => "RemoveAutoGen",
            FilterId::RemoveWip => "RemoveWip",
        }
    }
}

impl fmt::Display for FilterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FilterId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FilterId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown filter '{s}'"))
    }
}
