//! Code–docstring consistency scoring and gating.
//!
//! Labeled training data is built by keeping natural pairs (label 1) and
//! re-pairing docstrings with other code of the same language (label 0).
//! Pairs are scored by a pluggable [`Scorer`]: the in-process lexical
//! [`BaselineScorer`] or an external model speaking the NDJSON protocol in
//! [`sidecar`].

mod auc;
pub mod baseline;
mod negatives;
pub mod sidecar;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::{derive_seed, hash_with_seed};
use crate::io::JsonlWriter;
use crate::language::LanguageId;

pub use auc::evaluate_auc;
pub use baseline::baseline_score;
pub use negatives::{generate_negatives, sattolo};
pub use sidecar::{SidecarClient, SidecarConfig};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// A documented unit as it leaves the rule filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalPair {
    pub key: String,
    pub code: String,
    pub docstring: String,
    pub language: LanguageId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Natural,
    Shuffled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub code_key: String,
    pub doc_key: String,
    pub code: String,
    pub docstring: String,
    pub language: LanguageId,
    pub label: u8,
    pub origin: Origin,
}

impl LabeledPair {
    pub fn natural(p: &NaturalPair) -> Self {
        LabeledPair {
            code_key: p.key.clone(),
            doc_key: p.key.clone(),
            code: p.code.clone(),
            docstring: p.docstring.clone(),
            language: p.language,
            label: 1,
            origin: Origin::Natural,
        }
    }

    pub fn key(&self) -> String {
        match self.origin {
            Origin::Natural => self.code_key.clone(),
            Origin::Shuffled => format!("{}|{}", self.code_key, self.doc_key),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Baseline,
    Sidecar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Keep,
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub key: String,
    pub language: LanguageId,
    pub score: f64,
    pub backend: Backend,
    pub decision: Decision,
    /// Set when the sidecar failed and the sample was kept unscored.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fail_open: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateConfig {
    pub threshold: f64,
    pub backend: Backend,
    pub sample_fraction: f64,
    pub negative_ratio: f64,
    pub split_ratio: [u32; 3],
    pub sidecar: SidecarConfig,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig {
            threshold: DEFAULT_THRESHOLD,
            backend: Backend::Baseline,
            sample_fraction: 0.12,
            negative_ratio: 1.0,
            split_ratio: [3, 1, 1],
            sidecar: SidecarConfig::default(),
        }
    }
}

impl GateConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("gate threshold {} outside (0, 1)", self.threshold));
        }
        if !(self.sample_fraction > 0.0 && self.sample_fraction <= 1.0) {
            return bad(format!("sample_fraction {} outside (0, 1]", self.sample_fraction));
        }
        if !(self.negative_ratio > 0.0 && self.negative_ratio.is_finite()) {
            return bad(format!("negative_ratio {} must be positive", self.negative_ratio));
        }
        if self.split_ratio.iter().sum::<u32>() == 0 {
            return bad("split_ratio must not be all zero".into());
        }
        if self.backend == Backend::Sidecar {
            self.sidecar.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PairRef<'a> {
    pub code: &'a str,
    pub docstring: &'a str,
    pub language: LanguageId,
}

/// Anything that can score a batch of pairs; one score per input, in order.
pub trait Scorer {
    fn backend(&self) -> Backend;
    fn score_batch(&mut self, pairs: &[PairRef<'_>]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BaselineScorer;

impl Scorer for BaselineScorer {
    fn backend(&self) -> Backend {
        Backend::Baseline
    }

    fn score_batch(&mut self, pairs: &[PairRef<'_>]) -> Result<Vec<f64>> {
        Ok(pairs.par_iter().map(|p| baseline_score(p.code, p.docstring)).collect())
    }
}

pub fn score_pair(code: &str, docstring: &str, language: LanguageId, scorer: &mut dyn Scorer) -> Result<f64> {
    if code.is_empty() || docstring.is_empty() {
        return Err(Error::Config("score_pair needs non-empty code and docstring".into()));
    }
    let pair = PairRef { code, docstring, language };
    Ok(scorer.score_batch(&[pair])?[0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub score: f64,
    pub fail_open: bool,
}

/// Score `pairs` in batches. With `fail_open`, a scorer failure keeps the
/// affected pairs (score 1.0, flagged) instead of aborting.
pub fn score_all(
    pairs: &[PairRef<'_>],
    scorer: &mut dyn Scorer,
    batch_size: usize,
    fail_open: bool,
) -> Result<Vec<Scored>> {
    let mut out = Vec::with_capacity(pairs.len());
    let mut failed = false;
    for chunk in pairs.chunks(batch_size.max(1)) {
        if failed {
            out.extend(chunk.iter().map(|_| Scored { score: 1.0, fail_open: true }));
            continue;
        }
        match scorer.score_batch(chunk) {
            Ok(scores) => out.extend(scores.into_iter().map(|score| Scored { score, fail_open: false })),
            Err(err) if fail_open => {
                log::warn!("scorer failed, keeping remaining pairs unscored: {err}");
                failed = true;
                out.extend(chunk.iter().map(|_| Scored { score: 1.0, fail_open: true }));
            }
            Err(err) => return Err(err),
        }
    }
    Ok(out)
}

pub fn decide(score: f64, threshold: f64) -> Decision {
    if score >= threshold {
        Decision::Keep
    } else {
        Decision::Drop
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOutcome<T> {
    pub kept: Vec<T>,
    pub dropped: Vec<T>,
}

/// Partition samples by `score >= threshold`. Every sample needs a score.
pub fn gate<T>(
    samples: Vec<T>,
    key: impl Fn(&T) -> String,
    scores: &HashMap<String, f64>,
    threshold: f64,
) -> Result<GateOutcome<T>> {
    let missing: Vec<String> = samples.iter().map(&key).filter(|k| !scores.contains_key(k)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingScores(missing));
    }
    let mut out = GateOutcome { kept: Vec::new(), dropped: Vec::new() };
    for s in samples {
        match decide(scores[&key(&s)], threshold) {
            Decision::Keep => out.kept.push(s),
            Decision::Drop => out.dropped.push(s),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Consistent,
    Inconsistent,
    Uncertain,
}

impl Band {
    pub fn of(score: f64, threshold: f64) -> Option<Band> {
        if (score - threshold).abs() <= 0.1 {
            Some(Band::Uncertain)
        } else if score >= 0.75 {
            Some(Band::Consistent)
        } else if score < 0.25 {
            Some(Band::Inconsistent)
        } else {
            None
        }
    }
}

/// Audit sample: up to `per_band` records per (language, band), chosen by a
/// seeded hash of the key.
pub fn stratify_by_confidence(
    records: &[ScoreRecord],
    threshold: f64,
    per_band: usize,
    seed: u64,
) -> Vec<(Band, ScoreRecord)> {
    let salt = derive_seed(seed, "stratify");
    let mut cells: BTreeMap<(LanguageId, Band), Vec<(u64, &ScoreRecord)>> = BTreeMap::new();
    for r in records {
        if let Some(band) = Band::of(r.score, threshold) {
            cells.entry((r.language, band)).or_default().push((hash_with_seed(r.key.as_bytes(), salt), r));
        }
    }
    let mut out = Vec::new();
    for ((_, band), mut cell) in cells {
        cell.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.key.cmp(&b.1.key)));
        out.extend(cell.into_iter().take(per_band).map(|(_, r)| (band, r.clone())));
    }
    out
}

/// Seeded membership test used to carve the training sample out of the
/// filtered pairs.
pub fn in_sample(key: &str, fraction: f64, seed: u64) -> bool {
    if fraction >= 1.0 {
        return true;
    }
    let h = hash_with_seed(key.as_bytes(), derive_seed(seed, "gate-sample"));
    (h as f64) < fraction * (u64::MAX as f64)
}

pub const EXPORT_SPLITS: [&str; 3] = ["train", "valid", "test"];

/// Index into [`EXPORT_SPLITS`] for a labeled pair.
pub fn export_split(key: &str, ratio: [u32; 3], seed: u64) -> usize {
    let total: u64 = ratio.iter().map(|r| *r as u64).sum();
    let mut slot = hash_with_seed(key.as_bytes(), derive_seed(seed, "gate-export")) % total;
    for (i, r) in ratio.iter().enumerate() {
        if slot < *r as u64 {
            return i;
        }
        slot -= *r as u64;
    }
    unreachable!()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportCounts {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

#[derive(Serialize)]
struct ExportRow<'a> {
    schema: u32,
    #[serde(flatten)]
    pair: &'a LabeledPair,
}

/// Write `train.jsonl`, `valid.jsonl` and `test.jsonl` under `dir`.
pub fn export_training(pairs: &[LabeledPair], ratio: [u32; 3], seed: u64, dir: &Path) -> Result<ExportCounts> {
    let mut writers = EXPORT_SPLITS
        .iter()
        .map(|name| JsonlWriter::create(&dir.join(format!("{name}.jsonl"))))
        .collect::<Result<Vec<_>>>()?;
    for p in pairs {
        writers[export_split(&p.key(), ratio, seed)].write(&ExportRow { schema: 1, pair: p })?;
    }
    let mut counts = writers.into_iter().map(JsonlWriter::finish).collect::<Result<Vec<_>>>()?.into_iter();
    Ok(ExportCounts {
        train: counts.next().unwrap(),
        valid: counts.next().unwrap(),
        test: counts.next().unwrap(),
    })
}
