use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FilterId;
use crate::error::{Error, Result};

const DEFAULT_TOML: &str = include_str!("../../config/filters.toml");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthBounds {
    pub min: usize,
    pub max: usize,
}

impl LengthBounds {
    pub fn contains(&self, n: usize) -> bool {
        (self.min..=self.max).contains(&n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageIdConfig {
    pub english_threshold: f64,
    pub min_letters: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetadataCatalog {
    pub tags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AutogenCatalog {
    pub contains: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WipCatalog {
    pub words: Vec<String>,
    pub leading: Vec<String>,
    pub contains: Vec<String>,
}

/// Filter configuration; mirrors `filters.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub length: LengthBounds,
    pub inline_length: LengthBounds,
    pub language: LanguageIdConfig,
    pub enabled: BTreeMap<FilterId, bool>,
    pub metadata: MetadataCatalog,
    pub autogen: AutogenCatalog,
    pub wip: WipCatalog,
}

/// Partial view used when reading user files; missing keys fall back to the
/// shipped defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    length: Option<LengthBounds>,
    inline_length: Option<LengthBounds>,
    language: Option<LanguageIdConfig>,
    #[serde(default)]
    enabled: BTreeMap<FilterId, bool>,
    metadata: Option<MetadataCatalog>,
    autogen: Option<AutogenCatalog>,
    wip: Option<WipCatalog>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        let mut cfg: FilterConfig = toml::from_str(DEFAULT_TOML).expect("shipped filters.toml is valid");
        for id in FilterId::ALL {
            cfg.enabled.entry(id).or_insert(true);
        }
        cfg
    }
}

impl FilterConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let partial: PartialConfig = toml::from_str(s).map_err(|e| Error::Config(format!("filters config: {e}")))?;
        let mut cfg = FilterConfig::default();
        if let Some(v) = partial.length {
            cfg.length = v;
        }
        if let Some(v) = partial.inline_length {
            cfg.inline_length = v;
        }
        if let Some(v) = partial.language {
            cfg.language = v;
        }
        cfg.enabled.extend(partial.enabled);
        if let Some(v) = partial.metadata {
            cfg.metadata = v;
        }
        if let Some(v) = partial.autogen {
            cfg.autogen = v;
        }
        if let Some(v) = partial.wip {
            cfg.wip = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, b) in [("length", self.length), ("inline_length", self.inline_length)] {
            if b.min > b.max {
                return Err(Error::Config(format!("{name}: min {} exceeds max {}", b.min, b.max)));
            }
        }
        let t = self.language.english_threshold;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Config(format!("english_threshold {t} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn is_enabled(&self, id: FilterId) -> bool {
        self.enabled.get(&id).copied().unwrap_or(true)
    }
}
