//! Stage driver: ingest → extract → clean → score → dedup → split → stats.
//!
//! Every stage reads its inputs from the files persisted by the previous
//! stage and records a completion marker under `stages/`. A rerun with the
//! same configuration skips stages whose marker is present.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::consistency::{
    self, evaluate_auc, export_training, gate, generate_negatives, in_sample, score_all, stratify_by_confidence, Backend,
    BaselineScorer, Band, Decision, NaturalPair, PairRef, ScoreRecord, Scorer, SidecarClient,
};
use crate::dedup::{assign_splits, dedup_against, HoldoutRecord, SplitDiagnostics, SplitSample};
use crate::docstring::analyze;
use crate::error::{Error, Result};
use crate::filters::{filter_report, CleanOutcome, FilterEngine, FilterTrace};
use crate::hashing::{derive_seed, hash_with_seed};
use crate::ingest::{dump_raw, scan_corpus, RawSourceFile, ScanOptions, SkippedFile};
use crate::io::{output_path, read_jsonl, write_json_pretty, write_jsonl, JsonlWriter};
use crate::language::LanguageId;
use crate::records::{BlockRecord, DedupRow, SplitRow, UnitRecord, SCHEMA_VERSION};
use crate::stats::compute_stats;
use crate::syntax::{extract_file, DroppedUnit, ExtractedUnit, InlineSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ingest,
    Extract,
    Clean,
    Score,
    Dedup,
    Split,
    Stats,
}

impl Stage {
    pub const ALL: [Stage; 7] =
        [Stage::Ingest, Stage::Extract, Stage::Clean, Stage::Score, Stage::Dedup, Stage::Split, Stage::Stats];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Extract => "extract",
            Stage::Clean => "clean",
            Stage::Score => "score",
            Stage::Dedup => "dedup",
            Stage::Split => "split",
            Stage::Stats => "stats",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Stage::ALL.into_iter().find(|st| st.as_str() == s).ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

/// `input = output + Σ dropped` for one flow of items through a stage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    pub name: String,
    pub input: u64,
    pub output: u64,
    pub dropped: BTreeMap<String, u64>,
}

impl Ledger {
    pub fn new(name: &str, input: u64) -> Self {
        Ledger { name: name.to_string(), input, ..Default::default() }
    }

    pub fn drop(&mut self, reason: impl Into<String>, n: u64) {
        if n > 0 {
            *self.dropped.entry(reason.into()).or_default() += n;
        }
    }

    pub fn balanced(&self) -> bool {
        self.input == self.output + self.dropped.values().sum::<u64>()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: Option<Stage>,
    pub ledgers: Vec<Ledger>,
    /// Stage-specific figures that are not flows (AUC, split sizes, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub info: BTreeMap<String, serde_json::Value>,
}

impl StageReport {
    fn new(stage: Stage) -> Self {
        StageReport { stage: Some(stage), ..Default::default() }
    }

    pub fn ledger(&self, name: &str) -> Option<&Ledger> {
        self.ledgers.iter().find(|l| l.name == name)
    }
}

/// Documented units from extraction to `D_paired`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFlow {
    pub pairs_in: u64,
    pub filtered: u64,
    pub gated: u64,
    pub excluded: u64,
    pub pairs_out: u64,
}

impl PairFlow {
    pub fn balanced(&self) -> bool {
        self.pairs_in == self.pairs_out + self.filtered + self.gated + self.excluded
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub version: String,
    pub seed: u64,
    pub config: PipelineConfig,
    pub stages: Vec<StageReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<PairFlow>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn stage(&self, stage: Stage) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.stage == Some(stage))
    }

    pub fn balanced(&self) -> bool {
        self.stages.iter().all(|s| s.ledgers.iter().all(Ledger::balanced)) && self.pairs.as_ref().is_none_or(PairFlow::balanced)
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Last stage to run.
    pub until: Stage,
    /// Skip stages whose completion marker matches the configuration.
    pub resume: bool,
    /// Also write `{repo, path, language, content_hash}` rows here.
    pub dump_raw: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { until: Stage::Stats, resume: true, dump_raw: None }
    }
}

pub const MANIFEST_FILE: &str = "run_manifest.json";
const WORK_DIR: &str = "stages";

#[derive(Serialize, Deserialize)]
struct Marker {
    stage: Stage,
    fingerprint: String,
    report: StageReport,
}

struct Ctx<'a> {
    cfg: &'a PipelineConfig,
    out: PathBuf,
    work: PathBuf,
    fingerprint: String,
}

impl Ctx<'_> {
    fn out_file(&self, name: &str) -> PathBuf {
        output_path(&self.out, name, self.cfg.compress)
    }

    fn work_file(&self, name: &str) -> PathBuf {
        output_path(&self.work, name, self.cfg.compress)
    }

    fn marker(&self, stage: Stage) -> PathBuf {
        self.work.join(format!("{stage}.done.json"))
    }
}

/// The configuration as recorded in the manifest: machine-local knobs that
/// do not affect outputs are neutralised.
fn recorded_config(cfg: &PipelineConfig) -> PipelineConfig {
    PipelineConfig { out: PathBuf::from("."), jobs: 0, ..cfg.clone() }
}

fn fingerprint(cfg: &PipelineConfig) -> Result<String> {
    let mut bytes = serde_json::to_vec(&recorded_config(cfg))?;
    if let Some(p) = &cfg.filters {
        bytes.extend(std::fs::read(p).map_err(|e| Error::io(p, e))?);
    }
    for p in &cfg.holdout {
        bytes.extend(std::fs::read(p).map_err(|e| Error::io(p, e))?);
    }
    Ok(format!("{:016x}", hash_with_seed(&bytes, 0)))
}

/// Run the pipeline up to `opts.until` and write `run_manifest.json`.
pub fn run_pipeline(cfg: &PipelineConfig, opts: &RunOptions) -> Result<RunManifest> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_stages(cfg, opts))
}

fn run_stages(cfg: &PipelineConfig, opts: &RunOptions) -> Result<RunManifest> {
    let ctx = Ctx {
        cfg,
        out: cfg.out.clone(),
        work: cfg.out.join(WORK_DIR),
        fingerprint: fingerprint(cfg)?,
    };
    std::fs::create_dir_all(&ctx.work).map_err(|e| Error::io(&ctx.work, e))?;
    let mut reports = Vec::new();
    let mut reusable = opts.resume;
    for stage in Stage::ALL.into_iter().filter(|s| *s <= opts.until) {
        if reusable {
            if let Some(report) = load_marker(&ctx, stage) {
                log::info!("{stage}: up to date, skipping");
                reports.push(report);
                continue;
            }
            reusable = false;
        }
        for later in Stage::ALL.into_iter().filter(|s| *s >= stage) {
            let _ = std::fs::remove_file(ctx.marker(later));
        }
        log::info!("{stage}: running");
        let report = run_stage(&ctx, stage, opts).map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Stage { stage: stage.as_str(), source: Box::new(other) },
        })?;
        let marker = Marker { stage, fingerprint: ctx.fingerprint.clone(), report: report.clone() };
        write_json_pretty(&ctx.marker(stage), &marker)?;
        reports.push(report);
    }
    let manifest = build_manifest(&ctx, reports);
    write_json_pretty(&ctx.out.join(MANIFEST_FILE), &manifest)?;
    if !manifest.balanced() {
        return Err(Error::DataQuality("stage accounting does not balance; see run manifest".into()));
    }
    Ok(manifest)
}

fn load_marker(ctx: &Ctx<'_>, stage: Stage) -> Option<StageReport> {
    let text = std::fs::read_to_string(ctx.marker(stage)).ok()?;
    let marker: Marker = serde_json::from_str(&text).ok()?;
    (marker.stage == stage && marker.fingerprint == ctx.fingerprint).then_some(marker.report)
}

fn run_stage(ctx: &Ctx<'_>, stage: Stage, opts: &RunOptions) -> Result<StageReport> {
    match stage {
        Stage::Ingest => stage_ingest(ctx, opts),
        Stage::Extract => stage_extract(ctx),
        Stage::Clean => stage_clean(ctx),
        Stage::Score => stage_score(ctx),
        Stage::Dedup => stage_dedup(ctx),
        Stage::Split => stage_split(ctx),
        Stage::Stats => stage_stats(ctx),
    }
}

fn build_manifest(ctx: &Ctx<'_>, stages: Vec<StageReport>) -> RunManifest {
    let get = |s: Stage, ledger: &str| -> Option<&Ledger> {
        stages.iter().find(|r| r.stage == Some(s)).and_then(|r| r.ledger(ledger))
    };
    let pairs = match (get(Stage::Clean, "pairs"), get(Stage::Score, "pairs"), get(Stage::Dedup, "pairs"), get(Stage::Split, "pairs")) {
        (Some(c), Some(g), Some(d), Some(s)) => Some(PairFlow {
            pairs_in: c.input,
            filtered: c.dropped.values().sum(),
            gated: g.dropped.values().sum(),
            excluded: d.dropped.values().sum(),
            pairs_out: s.output,
        }),
        _ => None,
    };
    let last = stages.last().and_then(|s| s.stage);
    let outputs = final_outputs(ctx, last);
    RunManifest {
        schema: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: ctx.cfg.seed,
        config: recorded_config(ctx.cfg),
        stages,
        pairs,
        outputs,
    }
}

fn final_outputs(ctx: &Ctx<'_>, last: Option<Stage>) -> Vec<String> {
    let z = |n: &str| output_path(Path::new(""), n, ctx.cfg.compress).display().to_string();
    let mut out = Vec::new();
    let Some(last) = last else { return out };
    if last >= Stage::Clean {
        out.extend([z("D_unimodal.jsonl"), z("D_block.jsonl"), "filter_report.csv".into(), "filter_report.json".into()]);
    }
    if last >= Stage::Score {
        out.push(z("consistency/scores.jsonl"));
    }
    if last >= Stage::Dedup {
        out.push(z("dedup_report.jsonl"));
    }
    if last >= Stage::Split {
        out.extend([z("D_paired.jsonl"), z("split_manifest.jsonl")]);
    }
    if last >= Stage::Stats {
        out.extend(["stats.json".into(), "stats.csv".into()]);
    }
    out.push(MANIFEST_FILE.into());
    out.sort();
    out
}

fn stage_ingest(ctx: &Ctx<'_>, opts: &RunOptions) -> Result<StageReport> {
    let mut scan_opts = ScanOptions::new(ctx.cfg.languages.iter().copied());
    scan_opts.max_file_bytes = ctx.cfg.max_file_bytes;
    let mut scan = scan_corpus(&ctx.cfg.roots, &scan_opts)?;
    let mut w = JsonlWriter::create(&ctx.work_file("files.jsonl"))?;
    let mut files = Vec::new();
    for f in scan.by_ref() {
        w.write(&f)?;
        if opts.dump_raw.is_some() {
            files.push(f);
        }
    }
    w.finish()?;
    if let Some(p) = &opts.dump_raw {
        dump_raw(p, &files)?;
    }
    write_jsonl(&ctx.work_file("skipped.jsonl"), scan.skipped())?;
    let mut ledger = Ledger::new("files", scan.matched() as u64);
    ledger.output = scan.emitted() as u64;
    for s in scan.skipped() {
        ledger.drop(serde_json::to_value(s.reason)?.as_str().unwrap_or("skipped"), 1);
    }
    let mut report = StageReport::new(Stage::Ingest);
    report.ledgers.push(ledger);
    Ok(report)
}

#[derive(Serialize, Deserialize)]
struct ParseFailure {
    repo: String,
    path: String,
    error: String,
}

fn stage_extract(ctx: &Ctx<'_>) -> Result<StageReport> {
    let files: Vec<RawSourceFile> = read_jsonl(&ctx.work_file("files.jsonl"))?;
    let results: Vec<Result<crate::syntax::FileExtraction>> = files.par_iter().map(extract_file).collect();
    let mut units: Vec<ExtractedUnit> = Vec::new();
    let mut inline: Vec<InlineSample> = Vec::new();
    let mut dropped: Vec<DroppedUnit> = Vec::new();
    let mut failures = Vec::new();
    let mut out_of_bounds = 0u64;
    for (file, res) in files.iter().zip(results) {
        match res {
            Ok(x) => {
                units.extend(x.units.units);
                dropped.extend(x.units.dropped);
                inline.extend(x.inline.samples);
                out_of_bounds += x.inline.out_of_bounds as u64;
            }
            Err(Error::Parse(msg)) => {
                log::warn!("{}/{}: parse failure: {msg}", file.repo_id, file.rel_path);
                failures.push(ParseFailure { repo: file.repo_id.clone(), path: file.rel_path.clone(), error: msg });
            }
            Err(e) => return Err(e),
        }
    }
    write_jsonl(&ctx.work_file("units.jsonl"), &units)?;
    write_jsonl(&ctx.work_file("inline.jsonl"), &inline)?;
    write_jsonl(&ctx.work_file("extract_dropped.jsonl"), &dropped)?;
    write_jsonl(&ctx.work_file("parse_failures.jsonl"), &failures)?;

    let mut report = StageReport::new(Stage::Extract);
    let mut f = Ledger::new("files", files.len() as u64);
    f.output = (files.len() - failures.len()) as u64;
    f.drop("parse-failure", failures.len() as u64);
    let mut u = Ledger::new("units", (units.len() + dropped.len()) as u64);
    u.output = units.len() as u64;
    for d in &dropped {
        u.drop(serde_json::to_value(d.reason)?.as_str().unwrap_or("dropped"), 1);
    }
    let mut i = Ledger::new("inline", inline.len() as u64 + out_of_bounds);
    i.output = inline.len() as u64;
    i.drop("inline-token-bounds", out_of_bounds);
    report.ledgers = vec![f, u, i];
    let documented = units.iter().filter(|u| u.docstring_raw.is_some()).count();
    report.info.insert("units_with_docstring".into(), documented.into());
    report.info.insert("units_without_docstring".into(), (units.len() - documented).into());
    Ok(report)
}

fn stage_clean(ctx: &Ctx<'_>) -> Result<StageReport> {
    let engine = FilterEngine::new(ctx.cfg.filter_config()?);
    let units: Vec<ExtractedUnit> = read_jsonl(&ctx.work_file("units.jsonl"))?;
    let inline: Vec<InlineSample> = read_jsonl(&ctx.work_file("inline.jsonl"))?;

    let (documented, bare): (Vec<&ExtractedUnit>, Vec<&ExtractedUnit>) =
        units.iter().partition(|u| u.docstring_raw.is_some());
    let unimodal: Vec<UnitRecord> = bare.iter().map(|u| UnitRecord::unimodal(u)).collect();
    write_jsonl(&ctx.out_file("D_unimodal.jsonl"), &unimodal)?;

    let outcomes: Vec<(Option<UnitRecord>, FilterTrace)> = documented
        .par_iter()
        .map(|u| match engine.clean_pair(u) {
            CleanOutcome::Kept(clean, trace) => {
                let meta = analyze(clean.docstring_raw.as_deref().unwrap_or(""), clean.language);
                (Some(UnitRecord::paired(&clean, meta)), trace)
            }
            CleanOutcome::Dropped(trace) => (None, trace),
        })
        .collect();
    let mut totals: BTreeMap<LanguageId, u64> = BTreeMap::new();
    for u in &documented {
        *totals.entry(u.language).or_default() += 1;
    }
    let traces: Vec<&FilterTrace> = outcomes.iter().map(|(_, t)| t).collect();
    filter_report(traces.iter().copied(), &totals).write(&ctx.out)?;
    write_jsonl(&ctx.work_file("filter_traces.jsonl"), traces.iter().copied())?;
    let mut pairs = Ledger::new("pairs", documented.len() as u64);
    for (_, t) in &outcomes {
        if let Some(id) = t.removed_by {
            pairs.drop(id.as_str(), 1);
        }
    }
    let kept: Vec<UnitRecord> = outcomes.into_iter().filter_map(|(r, _)| r).collect();
    pairs.output = kept.len() as u64;
    write_jsonl(&ctx.work_file("pairs.jsonl"), &kept)?;

    let inline_out: Vec<CleanOutcome<InlineSample>> = inline.par_iter().map(|s| engine.clean_inline(s)).collect();
    let mut blocks = Ledger::new("inline", inline.len() as u64);
    let mut rows = Vec::new();
    for o in &inline_out {
        match o {
            CleanOutcome::Kept(s, _) => rows.push(BlockRecord::from(s)),
            CleanOutcome::Dropped(t) => blocks.drop(t.removed_by.map_or("dropped", |id| id.as_str()), 1),
        }
    }
    blocks.output = rows.len() as u64;
    write_jsonl(&ctx.out_file("D_block.jsonl"), &rows)?;

    let mut uni = Ledger::new("unimodal", unimodal.len() as u64);
    uni.output = unimodal.len() as u64;
    let mut report = StageReport::new(Stage::Clean);
    report.ledgers = vec![pairs, uni, blocks];
    Ok(report)
}

fn natural(r: &UnitRecord) -> NaturalPair {
    NaturalPair {
        key: r.key.clone(),
        code: r.code.clone(),
        docstring: r.docstring.clone().unwrap_or_default(),
        language: r.language,
    }
}

fn make_scorer(ctx: &Ctx<'_>) -> Result<Box<dyn Scorer>> {
    Ok(match ctx.cfg.gate.backend {
        Backend::Baseline => Box::new(BaselineScorer),
        Backend::Sidecar => Box::new(SidecarClient::spawn(&ctx.cfg.gate.sidecar)?),
    })
}

#[derive(Serialize)]
struct AuditRow<'a> {
    schema: u32,
    band: Band,
    #[serde(flatten)]
    record: &'a ScoreRecord,
}

fn stage_score(ctx: &Ctx<'_>) -> Result<StageReport> {
    let gate_cfg = &ctx.cfg.gate;
    let seed = ctx.cfg.seed;
    let pairs: Vec<UnitRecord> = read_jsonl(&ctx.work_file("pairs.jsonl"))?;
    let dir = ctx.out.join("consistency");
    let batch = match gate_cfg.backend {
        Backend::Baseline => 4096,
        Backend::Sidecar => gate_cfg.sidecar.batch_size,
    };
    let fail_open = gate_cfg.backend == Backend::Sidecar && gate_cfg.sidecar.fail_open;
    let mut report = StageReport::new(Stage::Score);

    // Self-supervised training sample for an external model, plus an
    // evaluation of the active scorer on it.
    let sample: Vec<NaturalPair> =
        pairs.iter().filter(|p| in_sample(&p.key, gate_cfg.sample_fraction, seed)).map(natural).collect();
    let labeled = generate_negatives(&sample, derive_seed(seed, "gate"), gate_cfg.negative_ratio);
    let counts = export_training(&labeled, gate_cfg.split_ratio, seed, &dir)?;
    report.info.insert("training_export".into(), serde_json::to_value(&counts)?);

    let mut scorer = make_scorer(ctx)?;
    let refs: Vec<PairRef<'_>> = labeled
        .iter()
        .map(|p| PairRef { code: &p.code, docstring: &p.docstring, language: p.language })
        .collect();
    let eval = score_all(&refs, scorer.as_mut(), batch, fail_open)?;
    let labels: Vec<u8> = labeled.iter().map(|p| p.label).collect();
    let eval_scores: Vec<f64> = eval.iter().map(|s| s.score).collect();
    match evaluate_auc(&eval_scores, &labels) {
        Ok(auc) => {
            report.info.insert("sample_auc".into(), auc.into());
        }
        Err(Error::SingleClass) => log::warn!("training sample has a single class; AUC not computed"),
        Err(e) => return Err(e),
    }

    let refs: Vec<PairRef<'_>> = pairs
        .iter()
        .map(|p| PairRef { code: &p.code, docstring: p.docstring.as_deref().unwrap_or(""), language: p.language })
        .collect();
    let scored = score_all(&refs, scorer.as_mut(), batch, fail_open)?;
    drop(scorer);
    let records: Vec<ScoreRecord> = pairs
        .iter()
        .zip(&scored)
        .map(|(p, s)| ScoreRecord {
            key: p.key.clone(),
            language: p.language,
            score: s.score,
            backend: gate_cfg.backend,
            decision: consistency::decide(s.score, gate_cfg.threshold),
            fail_open: s.fail_open,
        })
        .collect();
    write_jsonl(&output_path(&dir, "scores.jsonl", ctx.cfg.compress), &records)?;
    let audit = stratify_by_confidence(&records, gate_cfg.threshold, 100, seed);
    let audit_rows: Vec<AuditRow<'_>> =
        audit.iter().map(|(band, record)| AuditRow { schema: SCHEMA_VERSION, band: *band, record }).collect();
    write_jsonl(&dir.join("audit.jsonl"), &audit_rows)?;

    let scores: HashMap<String, f64> = records.iter().map(|r| (r.key.clone(), r.score)).collect();
    let total = pairs.len() as u64;
    let outcome = gate(pairs, |p| p.key.clone(), &scores, gate_cfg.threshold)?;
    let kept: Vec<UnitRecord> = outcome
        .kept
        .into_iter()
        .map(|mut p| {
            p.consistency_score = Some(scores[&p.key]);
            p
        })
        .collect();
    write_jsonl(&ctx.work_file("gated.jsonl"), &kept)?;
    let mut l = Ledger::new("pairs", total);
    l.output = kept.len() as u64;
    l.drop("consistency-gate", outcome.dropped.len() as u64);
    report.ledgers.push(l);
    let fail_opened = records.iter().filter(|r| r.fail_open).count();
    if fail_opened > 0 {
        report.info.insert("fail_open".into(), fail_opened.into());
    }
    debug_assert!(records.iter().all(|r| (r.decision == Decision::Keep) == (r.score >= gate_cfg.threshold)));
    Ok(report)
}

#[derive(Serialize, Deserialize)]
struct ExcludedRow {
    key: String,
    repo: String,
}

fn stage_dedup(ctx: &Ctx<'_>) -> Result<StageReport> {
    let pairs: Vec<UnitRecord> = read_jsonl(&ctx.work_file("gated.jsonl"))?;
    let mut holdout: Vec<HoldoutRecord> = Vec::new();
    for p in &ctx.cfg.holdout {
        holdout.extend(read_jsonl::<HoldoutRecord>(p)?);
    }
    let corpus: Vec<HoldoutRecord> =
        pairs.iter().map(|p| HoldoutRecord { key: p.key.clone(), code_tokens: p.code_tokens.clone() }).collect();
    let matches = dedup_against(&corpus, &holdout, &ctx.cfg.dedup, derive_seed(ctx.cfg.seed, "dedup"))?;
    let rows: Vec<DedupRow> = matches
        .iter()
        .map(|m| DedupRow {
            schema: SCHEMA_VERSION,
            corpus_key: m.corpus_key.clone(),
            holdout_key: m.holdout_key.clone(),
            est_jaccard: m.est_jaccard,
        })
        .collect();
    write_jsonl(&ctx.out_file("dedup_report.jsonl"), &rows)?;
    let excluded: BTreeSet<&str> = matches.iter().map(|m| m.corpus_key.as_str()).collect();
    let (gone, kept): (Vec<&UnitRecord>, Vec<&UnitRecord>) = pairs.iter().partition(|p| excluded.contains(p.key.as_str()));
    write_jsonl(&ctx.work_file("deduped.jsonl"), kept.iter().copied())?;
    let gone_rows: Vec<ExcludedRow> = gone.iter().map(|p| ExcludedRow { key: p.key.clone(), repo: p.repo.clone() }).collect();
    write_jsonl(&ctx.work_file("excluded.jsonl"), &gone_rows)?;
    let mut l = Ledger::new("pairs", pairs.len() as u64);
    l.output = kept.len() as u64;
    l.drop("near-duplicate", gone.len() as u64);
    let mut report = StageReport::new(Stage::Dedup);
    report.ledgers.push(l);
    report.info.insert("holdout_samples".into(), holdout.len().into());
    report.info.insert("matches".into(), matches.len().into());
    Ok(report)
}

fn stage_split(ctx: &Ctx<'_>) -> Result<StageReport> {
    let mut pairs: Vec<UnitRecord> = read_jsonl(&ctx.work_file("deduped.jsonl"))?;
    let excluded: Vec<ExcludedRow> = read_jsonl(&ctx.work_file("excluded.jsonl"))?;
    let seed = derive_seed(ctx.cfg.seed, "split");
    let samples: Vec<SplitSample> = pairs
        .iter()
        .map(|p| SplitSample { key: p.key.clone(), repo: p.repo.clone(), code_len: p.code_tokens.len() })
        .collect();
    let mut manifest = assign_splits(&samples, &ctx.cfg.split, seed)?;
    for e in &excluded {
        manifest.exclude(e.key.clone(), e.repo.clone());
    }
    let rows: Vec<SplitRow> = manifest
        .assignments
        .iter()
        .map(|(key, a)| SplitRow {
            schema: SCHEMA_VERSION,
            key: key.clone(),
            split: a.split,
            subsets: a.subsets.clone(),
            repo: a.repo.clone(),
        })
        .collect();
    write_jsonl(&ctx.out_file("split_manifest.jsonl"), &rows)?;
    write_json_pretty(&ctx.work.join("split_diagnostics.json"), &manifest.diagnostics)?;
    for p in &mut pairs {
        let a = &manifest.assignments[&p.key];
        p.split = Some(a.split);
        p.subsets = a.subsets.clone();
    }
    write_jsonl(&ctx.out_file("D_paired.jsonl"), &pairs)?;

    let mut l = Ledger::new("pairs", pairs.len() as u64);
    l.output = pairs.len() as u64;
    let mut report = StageReport::new(Stage::Split);
    report.ledgers.push(l);
    let SplitDiagnostics { counts, ks, swaps, ks_target_met, .. } = &manifest.diagnostics;
    report.info.insert("counts".into(), serde_json::to_value(counts)?);
    report.info.insert("ks".into(), serde_json::to_value(ks)?);
    report.info.insert("swaps".into(), (*swaps).into());
    report.info.insert("ks_target_met".into(), (*ks_target_met).into());
    report.info.insert("subset_fractions".into(), serde_json::to_value(&manifest.diagnostics.subset_fractions)?);
    Ok(report)
}

fn stage_stats(ctx: &Ctx<'_>) -> Result<StageReport> {
    let paired = ctx.out_file("D_paired.jsonl");
    let unimodal = ctx.out_file("D_unimodal.jsonl");
    let stats = compute_stats(&[&paired, &unimodal])?;
    stats.write(&ctx.out)?;
    stats.check_quality()?;
    let mut report = StageReport::new(Stage::Stats);
    report.info.insert("records".into(), (stats.lines - stats.malformed).into());
    Ok(report)
}

/// Skipped files recorded by the ingest stage of a run in `out`.
pub fn skipped_files(out: &Path, compress: bool) -> Result<Vec<SkippedFile>> {
    read_jsonl(&output_path(&out.join(WORK_DIR), "skipped.jsonl", compress))
}
