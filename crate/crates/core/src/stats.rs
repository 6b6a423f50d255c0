//! Dataset analytics over `D_paired` / `D_unimodal` JSONL files.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_jsonl_lenient;
use crate::language::LanguageId;

/// Lower bin edges; the last bin is open-ended.
pub const BIN_EDGES: [usize; 9] = [0, 8, 16, 32, 64, 128, 256, 512, 1024];
pub const MAX_MALFORMED_FRACTION: f64 = 0.01;

pub fn bin_of(len: usize) -> usize {
    BIN_EDGES.iter().rposition(|e| len >= *e).unwrap_or(0)
}

pub fn bin_labels() -> Vec<String> {
    BIN_EDGES
        .iter()
        .enumerate()
        .map(|(i, lo)| match BIN_EDGES.get(i + 1) {
            Some(hi) => format!("{lo}-{}", hi - 1),
            None => format!("{lo}+"),
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageStats {
    pub n_with_docstring: u64,
    pub n_total: u64,
    pub n_repos: u64,
    pub unique_code_tokens: u64,
    pub unique_docstring_tokens: u64,
    pub unique_identifiers: u64,
    pub code_length_histogram: [u64; 9],
    pub docstring_length_histogram: [u64; 9],
    pub style_counts: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub schema: u32,
    pub bin_edges: Vec<usize>,
    pub languages: BTreeMap<LanguageId, LanguageStats>,
    pub lines: u64,
    pub malformed: u64,
}

/// The fields statistics need; anything else in the row is ignored.
#[derive(Debug, Deserialize)]
struct StatsRow {
    repo: String,
    language: LanguageId,
    identifier: String,
    code_tokens: Vec<String>,
    #[serde(default)]
    docstring_tokens: Option<Vec<String>>,
    #[serde(default)]
    docstring_params: Option<StyleOnly>,
}

#[derive(Debug, Deserialize)]
struct StyleOnly {
    style: String,
}

#[derive(Default)]
struct Acc {
    stats: LanguageStats,
    repos: HashSet<String>,
    code: HashSet<String>,
    doc: HashSet<String>,
    ids: HashSet<String>,
}

impl DatasetStats {
    pub fn malformed_fraction(&self) -> f64 {
        if self.lines == 0 {
            0.0
        } else {
            self.malformed as f64 / self.lines as f64
        }
    }

    /// Data-quality gate: more than 1% malformed lines is an error.
    pub fn check_quality(&self) -> Result<()> {
        if self.malformed_fraction() > MAX_MALFORMED_FRACTION {
            return Err(Error::DataQuality(format!(
                "{} of {} lines malformed ({:.2}%)",
                self.malformed,
                self.lines,
                100.0 * self.malformed_fraction()
            )));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let labels = bin_labels();
        let mut header: Vec<String> = [
            "language",
            "n_with_docstring",
            "n_total",
            "n_repos",
            "unique_code_tokens",
            "unique_docstring_tokens",
            "unique_identifiers",
        ]
        .map(String::from)
        .to_vec();
        header.extend(labels.iter().map(|l| format!("code_{l}")));
        header.extend(labels.iter().map(|l| format!("docstring_{l}")));
        w.write_record(&header)?;
        for (lang, s) in &self.languages {
            let mut row = vec![
                lang.to_string(),
                s.n_with_docstring.to_string(),
                s.n_total.to_string(),
                s.n_repos.to_string(),
                s.unique_code_tokens.to_string(),
                s.unique_docstring_tokens.to_string(),
                s.unique_identifiers.to_string(),
            ];
            row.extend(s.code_length_histogram.iter().map(u64::to_string));
            row.extend(s.docstring_length_histogram.iter().map(u64::to_string));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Write `stats.json` and `stats.csv` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        crate::io::write_json_pretty(&dir.join("stats.json"), self)?;
        let csv_path = dir.join("stats.csv");
        std::fs::write(&csv_path, self.to_csv()?).map_err(|e| Error::io(&csv_path, e))
    }
}

/// Exact counts over the given files. Malformed lines are skipped and
/// counted; use [`DatasetStats::check_quality`] to enforce the limit.
pub fn compute_stats(paths: &[&Path]) -> Result<DatasetStats> {
    let mut accs: BTreeMap<LanguageId, Acc> = BTreeMap::new();
    let mut lines = 0u64;
    let mut malformed = 0u64;
    for path in paths {
        let read = read_jsonl_lenient::<StatsRow>(path)?;
        lines += read.lines as u64;
        malformed += read.malformed as u64;
        for row in read.records {
            let acc = accs.entry(row.language).or_default();
            acc.stats.n_total += 1;
            acc.stats.code_length_histogram[bin_of(row.code_tokens.len())] += 1;
            acc.repos.insert(row.repo);
            acc.ids.insert(row.identifier);
            acc.code.extend(row.code_tokens);
            if let Some(doc) = row.docstring_tokens {
                acc.stats.n_with_docstring += 1;
                acc.stats.docstring_length_histogram[bin_of(doc.len())] += 1;
                acc.doc.extend(doc);
            }
            if let Some(p) = row.docstring_params {
                *acc.stats.style_counts.entry(p.style).or_default() += 1;
            }
        }
    }
    let languages = accs
        .into_iter()
        .map(|(lang, a)| {
            let mut s = a.stats;
            s.n_repos = a.repos.len() as u64;
            s.unique_code_tokens = a.code.len() as u64;
            s.unique_docstring_tokens = a.doc.len() as u64;
            s.unique_identifiers = a.ids.len() as u64;
            (lang, s)
        })
        .collect();
    Ok(DatasetStats { schema: 1, bin_edges: BIN_EDGES.to_vec(), languages, lines, malformed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins() {
        assert_eq!(bin_of(0), 0);
        assert_eq!(bin_of(7), 0);
        assert_eq!(bin_of(8), 1);
        assert_eq!(bin_of(1023), 7);
        assert_eq!(bin_of(1024), 8);
        assert_eq!(bin_of(1 << 30), 8);
        assert_eq!(bin_labels()[8], "1024+");
    }

    #[test]
    fn empty_and_shared_identifier() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("e.jsonl");
        std::fs::write(&empty, "").unwrap();
        let s = compute_stats(&[&empty]).unwrap();
        assert!(s.languages.is_empty());
        assert_eq!(s.lines, 0);

        let p = dir.path().join("d.jsonl");
        let row = |r: &str| {
            format!(
                "{{\"repo\":\"{r}\",\"language\":\"go\",\"identifier\":\"Run\",\"code_tokens\":[\"func\",\"Run\"],\"docstring_tokens\":null}}\n"
            )
        };
        std::fs::write(&p, row("a") + &row("a") + &row("b")).unwrap();
        let s = compute_stats(&[&p]).unwrap();
        let go = &s.languages[&LanguageId::Go];
        assert_eq!(go.unique_identifiers, 1);
        assert_eq!(go.n_total, 3);
        assert_eq!(go.n_repos, 2);
        assert_eq!(go.n_with_docstring, 0);
        assert_eq!(go.code_length_histogram.iter().sum::<u64>(), 3);
        s.check_quality().unwrap();
        assert!(s.to_csv().unwrap().starts_with("language,"));
    }

    #[test]
    fn malformed_lines_trip_quality_gate() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.jsonl");
        let good = "{\"repo\":\"a\",\"language\":\"go\",\"identifier\":\"x\",\"code_tokens\":[]}\n";
        let mut body = good.repeat(99);
        body.push_str("{broken\n");
        std::fs::write(&p, &body).unwrap();
        let s = compute_stats(&[&p]).unwrap();
        assert_eq!(s.malformed, 1);
        s.check_quality().unwrap();
        body.push_str("{broken\n");
        std::fs::write(&p, &body).unwrap();
        assert!(matches!(compute_stats(&[&p]).unwrap().check_quality(), Err(Error::DataQuality(_))));
    }
}
