//! Remove-action filters. Each is a pure predicate over `(tokens, text)`.

use super::config::{AutogenCatalog, LengthBounds, WipCatalog};
use super::langid;
use super::{FilterConfig, FilterId};

pub fn is_empty(text: &str) -> bool {
    !text.chars().any(char::is_alphanumeric)
}

pub fn bad_length(tokens: &[String], bounds: LengthBounds) -> bool {
    !bounds.contains(tokens.len())
}

pub fn non_english(text: &str, cfg: &FilterConfig) -> bool {
    langid::english_probability(text, cfg.language.min_letters) < cfg.language.english_threshold
}

pub fn auto_generated(text: &str, catalog: &AutogenCatalog) -> bool {
    let lower = text.to_lowercase();
    catalog.contains.iter().any(|p| lower.contains(&p.to_lowercase()))
}

pub fn work_in_progress(tokens: &[String], text: &str, catalog: &WipCatalog) -> bool {
    if tokens.first().is_some_and(|t| catalog.leading.iter().any(|l| l == t)) {
        return true;
    }
    if tokens.iter().any(|t| catalog.words.iter().any(|w| w == t)) {
        return true;
    }
    let lower = text.to_lowercase();
    catalog.contains.iter().any(|p| lower.contains(&p.to_lowercase()))
}

/// First remove filter (in application order) that rejects the sample.
pub fn first_removal(tokens: &[String], text: &str, cfg: &FilterConfig, bounds: LengthBounds) -> Option<FilterId> {
    FilterId::REMOVE_ORDER.into_iter().filter(|id| cfg.is_enabled(*id)).find(|id| match id {
        FilterId::RemoveEmpty => is_empty(text),
        FilterId::RemoveBadLength => bad_length(tokens, bounds),
        FilterId::RemoveNonEnglish => non_english(text, cfg),
        FilterId::RemoveAutoGen => auto_generated(text, &cfg.autogen),
        FilterId::RemoveWip => work_in_progress(tokens, text, &cfg.wip),
        _ => false,
    })
}
