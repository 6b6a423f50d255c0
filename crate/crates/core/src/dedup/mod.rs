//! Near-duplicate removal against held-out sets and repository-disjoint
//! splitting.

mod holdout;
mod lsh;
mod minhash;
mod split;
mod subsets;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::derive_seed;

pub use holdout::{export_holdout, FieldMap};
pub use lsh::{confirm_exact, find_near_duplicates, DupMatch, LshIndex};
pub use minhash::{exact_jaccard, minhash_signature, shingle_set, MinHashSignature, DEFAULT_NUM_PERM, DEFAULT_SHINGLE};
pub use split::{
    ks_distance, split_by_repo, Assignment, Split, SplitDiagnostics, SplitManifest, SplitSample, FRACTION_TOLERANCE,
    KS_TARGET, MAX_SWAP_ATTEMPTS,
};
pub use subsets::{sample_subsets, SubsetFlags, DEFAULT_SUBSETS};

/// One held-out sample in the dedup input format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoldoutRecord {
    pub key: String,
    pub code_tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DedupConfig {
    pub num_perm: usize,
    pub shingle: usize,
    pub bands: usize,
    pub rows: usize,
    pub threshold: f64,
    pub exact_confirm: bool,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig {
            num_perm: DEFAULT_NUM_PERM,
            shingle: DEFAULT_SHINGLE,
            bands: 32,
            rows: 8,
            threshold: 0.8,
            exact_confirm: false,
        }
    }
}

impl DedupConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shingle == 0 || self.num_perm == 0 {
            return Err(Error::Config("dedup shingle width and num_perm must be positive".into()));
        }
        if self.bands * self.rows != self.num_perm {
            return Err(Error::Config(format!(
                "LSH banding {}x{} does not match num_perm {}",
                self.bands, self.rows, self.num_perm
            )));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::Config(format!("dedup threshold {} outside (0, 1]", self.threshold)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitConfig {
    pub ratios: [f64; 3],
    /// Ascending `(name, fraction of train)` pairs.
    pub subsets: Vec<(String, f64)>,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            ratios: [0.8, 0.1, 0.1],
            subsets: DEFAULT_SUBSETS.iter().map(|(n, f)| (n.to_string(), *f)).collect(),
        }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ratios.iter().any(|r| !(0.0..=1.0).contains(r)) || (self.ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split ratios {:?} must sum to 1", self.ratios)));
        }
        let mut prev = 0.0;
        for (name, f) in &self.subsets {
            if !(*f > 0.0 && *f <= 1.0) || *f < prev {
                return Err(Error::Config(format!("subset `{name}` fraction {f} must ascend within (0, 1]")));
            }
            prev = *f;
        }
        Ok(())
    }
}

/// Repository-disjoint split plus nested subsets of its training part.
pub fn assign_splits(samples: &[SplitSample], cfg: &SplitConfig, seed: u64) -> Result<SplitManifest> {
    cfg.validate()?;
    let mut manifest = split_by_repo(samples, cfg.ratios, seed)?;
    let train: Vec<(String, String)> = samples
        .iter()
        .filter(|s| manifest.assignments[&s.key].split == Split::Train)
        .map(|s| (s.key.clone(), s.repo.clone()))
        .collect();
    let subsets = sample_subsets(&train, &cfg.subsets, derive_seed(seed, "subsets"))?;
    for (key, names) in subsets.flags {
        manifest.assignments.get_mut(&key).expect("train key").subsets = names;
    }
    manifest.diagnostics.subset_fractions = subsets.achieved;
    Ok(manifest)
}

/// Sign every sample, then report corpus samples near a holdout sample.
pub fn dedup_against(
    corpus: &[HoldoutRecord],
    holdout: &[HoldoutRecord],
    cfg: &DedupConfig,
    seed: u64,
) -> Result<Vec<DupMatch>> {
    use rayon::prelude::*;
    cfg.validate()?;
    let sign = |recs: &[HoldoutRecord]| -> Vec<(String, MinHashSignature)> {
        recs.par_iter()
            .map(|r| (r.key.clone(), minhash_signature(&r.code_tokens, cfg.num_perm, cfg.shingle, seed)))
            .collect()
    };
    let matches = find_near_duplicates(&sign(corpus), &sign(holdout), cfg.bands, cfg.rows, cfg.threshold)?;
    if !cfg.exact_confirm {
        return Ok(matches);
    }
    let index = |recs: &[HoldoutRecord]| recs.iter().map(|r| (r.key.clone(), r.code_tokens.clone())).collect();
    Ok(confirm_exact(matches, &index(corpus), &index(holdout), cfg.shingle, cfg.threshold))
}
