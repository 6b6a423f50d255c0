//! Pipeline configuration, loaded from TOML and validated before any stage
//! runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::consistency::GateConfig;
use crate::dedup::{DedupConfig, SplitConfig};
use crate::error::{Error, Result};
use crate::filters::FilterConfig;
use crate::ingest::DEFAULT_MAX_FILE_BYTES;
use crate::language::LanguageId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Directory trees or `corpus.jsonl` manifests.
    pub roots: Vec<PathBuf>,
    pub languages: Vec<LanguageId>,
    /// Filter catalog; the built-in defaults when absent.
    pub filters: Option<PathBuf>,
    /// Holdout JSONL files of `{key, code_tokens}` to dedup against.
    pub holdout: Vec<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    pub compress: bool,
    pub max_file_bytes: u64,
    pub gate: GateConfig,
    pub dedup: DedupConfig,
    pub split: SplitConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            roots: Vec::new(),
            languages: LanguageId::ALL.to_vec(),
            filters: None,
            holdout: Vec::new(),
            out: PathBuf::from("out"),
            seed: 0,
            jobs: 0,
            compress: false,
            max_file_bytes: DEFAULT_MAX_FILE_BYTES,
            gate: GateConfig::default(),
            dedup: DedupConfig::default(),
            split: SplitConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Load a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.roots.iter_mut().for_each(fix);
        cfg.holdout.iter_mut().for_each(fix);
        cfg.filters.iter_mut().for_each(fix);
        fix(&mut cfg.out);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.languages.is_empty() {
            return Err(Error::Config("language set is empty".into()));
        }
        if self.roots.is_empty() {
            return Err(Error::Config("no corpus roots given".into()));
        }
        if self.max_file_bytes == 0 {
            return Err(Error::Config("max_file_bytes must be positive".into()));
        }
        self.gate.validate()?;
        self.dedup.validate()?;
        self.split.validate()?;
        self.filter_config()?.validate()
    }

    pub fn filter_config(&self) -> Result<FilterConfig> {
        match &self.filters {
            Some(p) => FilterConfig::from_path(p),
            None => Ok(FilterConfig::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_validate() {
        let cfg = PipelineConfig::from_toml_str(
            "roots = [\"corpus\"]\nlanguages = [\"python\", \"c_sharp\"]\nseed = 7\n[gate]\nthreshold = 0.6\n[split]\nratios = [0.7, 0.2, 0.1]\n",
        )
        .unwrap();
        assert_eq!(cfg.languages, [LanguageId::Python, LanguageId::CSharp]);
        assert_eq!(cfg.gate.threshold, 0.6);
        assert_eq!(cfg.dedup.bands, 32);
        cfg.validate().unwrap();
    }

    #[test]
    fn empty_language_set_rejected() {
        let cfg = PipelineConfig::from_toml_str("roots = [\"x\"]\nlanguages = []\n").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(m)) if m.contains("language")));
        assert!(PipelineConfig::from_toml_str("bogus = 1\n").is_err());
    }

    #[test]
    fn relative_paths_follow_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("forge.toml");
        std::fs::write(&p, "roots = [\"corpus\"]\nout = \"build\"\n").unwrap();
        let cfg = PipelineConfig::from_path(&p).unwrap();
        assert_eq!(cfg.roots, [dir.path().join("corpus")]);
        assert_eq!(cfg.out, dir.path().join("build"));
    }
}
