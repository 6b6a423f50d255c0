use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::engine::FilterTrace;
use super::{Action, FilterId};
use crate::error::{Error, Result};
use crate::language::LanguageId;

pub const TOTAL: &str = "total";

/// Mergeable per-language filter counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub inputs: BTreeMap<LanguageId, u64>,
    pub kept: BTreeMap<LanguageId, u64>,
    pub touched: BTreeMap<LanguageId, BTreeMap<FilterId, u64>>,
}

impl FilterStats {
    pub fn record(&mut self, trace: &FilterTrace) {
        *self.inputs.entry(trace.language).or_default() += 1;
        let touched = self.touched.entry(trace.language).or_default();
        for id in trace.applied.iter().chain(trace.removed_by.iter()) {
            *touched.entry(*id).or_default() += 1;
        }
        let kept = self.kept.entry(trace.language).or_default();
        if trace.kept() {
            *kept += 1;
        }
    }

    pub fn merge(&mut self, other: &FilterStats) {
        for (l, n) in &other.inputs {
            *self.inputs.entry(*l).or_default() += n;
        }
        for (l, n) in &other.kept {
            *self.kept.entry(*l).or_default() += n;
        }
        for (l, m) in &other.touched {
            let mine = self.touched.entry(*l).or_default();
            for (id, n) in m {
                *mine.entry(*id).or_default() += n;
            }
        }
    }

    pub fn input_total(&self) -> u64 {
        self.inputs.values().sum()
    }

    pub fn kept_total(&self) -> u64 {
        self.kept.values().sum()
    }

    pub fn dropped(&self, lang: LanguageId) -> u64 {
        self.inputs.get(&lang).copied().unwrap_or(0) - self.kept.get(&lang).copied().unwrap_or(0)
    }

    pub fn touched(&self, lang: LanguageId, id: FilterId) -> u64 {
        self.touched.get(&lang).and_then(|m| m.get(&id)).copied().unwrap_or(0)
    }

    pub fn report(&self) -> FilterReport {
        let languages: Vec<LanguageId> = self.inputs.keys().copied().collect();
        let column = |f: &dyn Fn(LanguageId) -> u64| -> BTreeMap<String, u64> {
            let mut m: BTreeMap<String, u64> = languages.iter().map(|l| (l.as_str().to_string(), f(*l))).collect();
            m.insert(TOTAL.to_string(), languages.iter().map(|l| f(*l)).sum());
            m
        };
        let inputs = column(&|l| self.inputs.get(&l).copied().unwrap_or(0));
        let kept = column(&|l| self.kept.get(&l).copied().unwrap_or(0));
        let dropped = column(&|l| self.dropped(l));
        let rows = FilterId::ALL
            .into_iter()
            .map(|id| {
                let counts = column(&|l| self.touched(l, id));
                let percent = counts
                    .iter()
                    .map(|(k, n)| {
                        let base = inputs[k];
                        (k.clone(), if base == 0 { 0.0 } else { *n as f64 / base as f64 * 100.0 })
                    })
                    .collect();
                FilterRow { filter: id, action: id.action(), counts, percent }
            })
            .collect();
        FilterReport { schema: 1, languages, inputs, kept, dropped, rows }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterRow {
    pub filter: FilterId,
    pub action: Action,
    pub counts: BTreeMap<String, u64>,
    pub percent: BTreeMap<String, f64>,
}

/// Per-rule share of input samples touched, by language plus a total column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub schema: u32,
    pub languages: Vec<LanguageId>,
    pub inputs: BTreeMap<String, u64>,
    pub kept: BTreeMap<String, u64>,
    pub dropped: BTreeMap<String, u64>,
    pub rows: Vec<FilterRow>,
}

impl FilterReport {
    pub fn row(&self, id: FilterId) -> &FilterRow {
        self.rows.iter().find(|r| r.filter == id).expect("every filter has a row")
    }

    fn columns(&self) -> Vec<String> {
        self.languages.iter().map(|l| l.as_str().to_string()).chain([TOTAL.to_string()]).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let cols = self.columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = ["filter", "action"].into_iter().chain(cols.iter().map(String::as_str)).collect();
        w.write_record(&header)?;
        let mut inputs = vec!["inputs".to_string(), String::new()];
        inputs.extend(cols.iter().map(|c| self.inputs[c].to_string()));
        w.write_record(&inputs)?;
        for row in &self.rows {
            let mut rec = vec![row.filter.to_string(), format!("{:?}", row.action).to_lowercase()];
            rec.extend(cols.iter().map(|c| format!("{:.4}", row.percent[c])));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let csv_path = dir.join("filter_report.csv");
        std::fs::write(&csv_path, self.to_csv()?).map_err(|e| Error::io(&csv_path, e))?;
        crate::io::write_json_pretty(&dir.join("filter_report.json"), self)
    }
}

/// Builds the report from traces; `totals` overrides the per-language input
/// counts used as denominators.
pub fn filter_report<'a>(
    traces: impl IntoIterator<Item = &'a FilterTrace>,
    totals: &BTreeMap<LanguageId, u64>,
) -> FilterReport {
    let mut stats = FilterStats::default();
    for t in traces {
        stats.record(t);
    }
    for (l, n) in totals {
        stats.inputs.insert(*l, *n);
        stats.kept.entry(*l).or_default();
    }
    stats.report()
}
