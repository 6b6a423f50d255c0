//! Corpus discovery: walk directory trees (or read a JSONL manifest), attach
//! repository provenance and language, and emit records in a deterministic
//! `(repo_id, rel_path)` order.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::hashing::content_hash;
use crate::io::{open_reader, JsonlWriter};
use crate::language::{detect_language, LanguageId};

pub const DEFAULT_MAX_FILE_BYTES: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSourceFile {
    pub repo_id: String,
    pub rel_path: String,
    pub language: LanguageId,
    pub content: String,
    pub content_hash: u64,
}

impl RawSourceFile {
    pub fn new(repo_id: impl Into<String>, rel_path: impl Into<String>, language: LanguageId, content: String) -> Self {
        let content_hash = content_hash(content.as_bytes());
        Self {
            repo_id: repo_id.into(),
            rel_path: rel_path.into(),
            language,
            content,
            content_hash,
        }
    }
}

/// Row of the `--dump-raw` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDumpRecord {
    pub repo: String,
    pub path: String,
    pub language: LanguageId,
    pub content_hash: u64,
}

impl From<&RawSourceFile> for RawDumpRecord {
    fn from(f: &RawSourceFile) -> Self {
        Self {
            repo: f.repo_id.clone(),
            path: f.rel_path.clone(),
            language: f.language,
            content_hash: f.content_hash,
        }
    }
}

/// One line of an optional `corpus.jsonl` manifest.
#[derive(Debug, Clone, Deserialize)]
pub struct ManifestEntry {
    pub repo: String,
    pub path: String,
    pub content: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    TooLarge,
    Binary,
    Unreadable,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub repo_id: String,
    pub rel_path: String,
    pub reason: SkipReason,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub include: BTreeSet<LanguageId>,
    pub max_file_bytes: u64,
}

impl ScanOptions {
    pub fn new(include: impl IntoIterator<Item = LanguageId>) -> Self {
        Self {
            include: include.into_iter().collect(),
            max_file_bytes: DEFAULT_MAX_FILE_BYTES,
        }
    }
}

enum Source {
    Disk(PathBuf),
    Inline(String),
}

struct Candidate {
    language: LanguageId,
    source: Source,
}

/// A planned scan. Paths are discovered eagerly and sorted; content is read
/// lazily as the iterator advances.
pub struct CorpusScan {
    planned: std::vec::IntoIter<((String, String), Candidate)>,
    max_file_bytes: u64,
    skipped: Vec<SkippedFile>,
    matched: usize,
    emitted: usize,
}

/// Discover files under `roots`. A root that is a `.jsonl` file is read as a
/// manifest of `{repo, path, content}` rows; a directory root yields one
/// repository per top-level subdirectory.
pub fn scan_corpus(roots: &[PathBuf], opts: &ScanOptions) -> Result<CorpusScan> {
    let mut planned: BTreeMap<(String, String), Candidate> = BTreeMap::new();
    let mut skipped = Vec::new();
    let mut matched = 0usize;

    let mut add = |key: (String, String), cand: Candidate, skipped: &mut Vec<SkippedFile>| {
        matched += 1;
        match planned.entry(key) {
            std::collections::btree_map::Entry::Occupied(e) => {
                let (repo_id, rel_path) = e.key().clone();
                skipped.push(SkippedFile { repo_id, rel_path, reason: SkipReason::Duplicate });
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(cand);
            }
        }
    };

    for root in roots {
        let meta = std::fs::metadata(root).map_err(|source| Error::UnreadableRoot {
            path: root.clone(),
            source,
        })?;
        if meta.is_file() {
            for entry in read_manifest(root)? {
                let Some(language) = detect_language(&entry.path) else { continue };
                if !opts.include.contains(&language) {
                    continue;
                }
                add(
                    (entry.repo, entry.path),
                    Candidate { language, source: Source::Inline(entry.content) },
                    &mut skipped,
                );
            }
            continue;
        }
        // Reading the directory up front surfaces permission errors as fatal.
        std::fs::read_dir(root).map_err(|source| Error::UnreadableRoot {
            path: root.clone(),
            source,
        })?;
        let root_name = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| ".".to_string());
        for entry in WalkDir::new(root).follow_links(false).sort_by_file_name() {
            let entry = match entry {
                Ok(e) => e,
                Err(err) => {
                    log::warn!("skipping unreadable entry under {}: {err}", root.display());
                    continue;
                }
            };
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
            let mut comps: Vec<String> = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect();
            let (repo_id, rel_path) = if comps.len() >= 2 {
                let repo = comps.remove(0);
                (repo, comps.join("/"))
            } else {
                (root_name.clone(), comps.join("/"))
            };
            let Some(language) = detect_language(&rel_path) else { continue };
            if !opts.include.contains(&language) {
                continue;
            }
            add(
                (repo_id, rel_path),
                Candidate { language, source: Source::Disk(entry.path().to_path_buf()) },
                &mut skipped,
            );
        }
    }

    Ok(CorpusScan {
        planned: planned.into_iter().collect::<Vec<_>>().into_iter(),
        max_file_bytes: opts.max_file_bytes,
        skipped,
        matched,
        emitted: 0,
    })
}

fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let reader = open_reader(path)?;
    let mut out = Vec::new();
    for (idx, line) in std::io::BufRead::lines(reader).enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry = serde_json::from_str(&line).map_err(|e| Error::Record {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(entry);
    }
    Ok(out)
}

/// Decode bytes as text. Files with NUL bytes are treated as binary; other
/// invalid sequences are replaced lossily.
fn decode_text(bytes: Vec<u8>) -> Option<String> {
    if bytes.contains(&0) {
        return None;
    }
    Some(match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => String::from_utf8_lossy(e.as_bytes()).into_owned(),
    })
}

impl CorpusScan {
    pub fn skipped(&self) -> &[SkippedFile] {
        &self.skipped
    }

    /// Number of files whose extension matched an included language.
    pub fn matched(&self) -> usize {
        self.matched
    }

    pub fn emitted(&self) -> usize {
        self.emitted
    }

    fn skip(&mut self, key: (String, String), reason: SkipReason) {
        log::debug!("skip {}/{}: {:?}", key.0, key.1, reason);
        self.skipped.push(SkippedFile {
            repo_id: key.0,
            rel_path: key.1,
            reason,
        });
    }
}

impl Iterator for CorpusScan {
    type Item = RawSourceFile;

    fn next(&mut self) -> Option<RawSourceFile> {
        loop {
            let (key, cand) = self.planned.next()?;
            let content = match cand.source {
                Source::Inline(text) => {
                    if text.len() as u64 > self.max_file_bytes {
                        self.skip(key, SkipReason::TooLarge);
                        continue;
                    }
                    text
                }
                Source::Disk(path) => {
                    match std::fs::metadata(&path) {
                        Ok(m) if m.len() > self.max_file_bytes => {
                            self.skip(key, SkipReason::TooLarge);
                            continue;
                        }
                        Ok(_) => {}
                        Err(_) => {
                            self.skip(key, SkipReason::Unreadable);
                            continue;
                        }
                    }
                    let bytes = match std::fs::read(&path) {
                        Ok(b) => b,
                        Err(_) => {
                            self.skip(key, SkipReason::Unreadable);
                            continue;
                        }
                    };
                    match decode_text(bytes) {
                        Some(s) => s,
                        None => {
                            self.skip(key, SkipReason::Binary);
                            continue;
                        }
                    }
                }
            };
            self.emitted += 1;
            return Some(RawSourceFile::new(key.0, key.1, cand.language, content));
        }
    }
}

/// Write the `--dump-raw` index for a set of files.
pub fn dump_raw<'a>(path: &Path, files: impl IntoIterator<Item = &'a RawSourceFile>) -> Result<usize> {
    let mut w = JsonlWriter::create(path)?;
    for f in files {
        w.write(&RawDumpRecord::from(f))?;
    }
    w.finish()
}
