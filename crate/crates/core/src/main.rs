use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use forge_core::config::PipelineConfig;
use forge_core::consistency::sidecar::{serve, ServeOptions};
use forge_core::consistency::Backend;
use forge_core::dedup::{export_holdout, FieldMap};
use forge_core::language::{parse_language_list, LanguageId};
use forge_core::pipeline::{run_pipeline, RunManifest, RunOptions, Stage};
use forge_core::stats::compute_stats;
use forge_core::{Error, Result};

/// Build code-text datasets from source trees.
#[derive(Parser)]
#[command(name = "forge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discover files and extract units and inline comments.
    Extract(Common),
    /// Extract, then apply the rule-based filters.
    Clean(Common),
    /// Run up to the consistency gate.
    Score(Common),
    /// Run up to near-duplicate removal.
    Dedup(Common),
    /// Run up to the repository-disjoint split.
    Split(Common),
    /// Compute statistics, either for `--input` files or as the last stage.
    Stats(StatsArgs),
    /// Run every stage.
    Pipeline(Common),
    /// Tokenize a benchmark file into the dedup holdout format.
    ExportHoldout(HoldoutArgs),
    #[command(hide = true)]
    ServeBaseline(ServeArgs),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus root (directory or corpus.jsonl); repeatable.
    #[arg(long = "root")]
    roots: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Comma-separated language list, e.g. `python,go,cpp`.
    #[arg(long)]
    langs: Option<String>,
    /// zstd-compress JSONL outputs.
    #[arg(long)]
    zstd: bool,
    /// Holdout `{key, code_tokens}` JSONL; repeatable.
    #[arg(long = "holdout")]
    holdout: Vec<PathBuf>,
    #[arg(long)]
    filters: Option<PathBuf>,
    #[arg(long, value_parser = ["baseline", "sidecar"])]
    backend: Option<String>,
    /// Sidecar command line, split on whitespace.
    #[arg(long)]
    sidecar: Option<String>,
    /// Write one `{repo, path, language, content_hash}` row per file.
    #[arg(long)]
    dump_raw: Option<PathBuf>,
    /// Rerun every stage even when its outputs are up to date.
    #[arg(long)]
    no_resume: bool,
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args)]
struct StatsArgs {
    /// Dataset files to summarise; without them the pipeline runs to stats.
    #[arg(long = "input")]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct HoldoutArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "key")]
    key_field: String,
    #[arg(long, default_value = "code")]
    code_field: String,
    #[arg(long)]
    lang_field: Option<String>,
    #[arg(long)]
    lang: Option<LanguageId>,
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 0)]
    reorder: usize,
    #[arg(long)]
    exit_after: Option<usize>,
    #[arg(long)]
    stall_after: Option<usize>,
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
}

fn load_config(c: &Common) -> Result<PipelineConfig> {
    let mut cfg = match &c.config {
        Some(p) => PipelineConfig::from_path(p)?,
        None => PipelineConfig::default(),
    };
    if !c.roots.is_empty() {
        cfg.roots = c.roots.clone();
    }
    if let Some(out) = &c.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(jobs) = c.jobs {
        cfg.jobs = jobs;
    }
    if let Some(langs) = &c.langs {
        cfg.languages = parse_language_list(langs).map_err(Error::Config)?;
    }
    if c.zstd {
        cfg.compress = true;
    }
    cfg.holdout.extend(c.holdout.iter().cloned());
    if let Some(f) = &c.filters {
        cfg.filters = Some(f.clone());
    }
    match c.backend.as_deref() {
        Some("sidecar") => cfg.gate.backend = Backend::Sidecar,
        Some(_) => cfg.gate.backend = Backend::Baseline,
        None => {}
    }
    if let Some(cmd) = &c.sidecar {
        cfg.gate.sidecar.command = cmd.split_whitespace().map(String::from).collect();
    }
    Ok(cfg)
}

fn print_summary(m: &RunManifest) {
    for s in &m.stages {
        let name = s.stage.map(|st| st.as_str()).unwrap_or("?");
        for l in &s.ledgers {
            let dropped: Vec<String> = l.dropped.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!("{name:<8} {:<9} in={:<7} out={:<7} {}", l.name, l.input, l.output, dropped.join(" "));
        }
    }
    if let Some(p) = &m.pairs {
        println!(
            "pairs: {} in, {} filtered, {} gated, {} excluded, {} out",
            p.pairs_in, p.filtered, p.gated, p.excluded, p.pairs_out
        );
    }
}

fn run_to(c: &Common, until: Stage) -> Result<()> {
    init_logging(c.verbose);
    let cfg = load_config(c)?;
    let opts = RunOptions { until, resume: !c.no_resume, dump_raw: c.dump_raw.clone() };
    let manifest = run_pipeline(&cfg, &opts)?;
    print_summary(&manifest);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract(c) => run_to(&c, Stage::Extract),
        Command::Clean(c) => run_to(&c, Stage::Clean),
        Command::Score(c) => run_to(&c, Stage::Score),
        Command::Dedup(c) => run_to(&c, Stage::Dedup),
        Command::Split(c) => run_to(&c, Stage::Split),
        Command::Pipeline(c) => run_to(&c, Stage::Stats),
        Command::Stats(a) if a.inputs.is_empty() => run_to(&a.common, Stage::Stats),
        Command::Stats(a) => {
            init_logging(a.common.verbose);
            let paths: Vec<&std::path::Path> = a.inputs.iter().map(PathBuf::as_path).collect();
            let stats = compute_stats(&paths)?;
            let out = a.common.out.unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            stats.write(&out)?;
            println!("{} records, {} malformed lines", stats.lines - stats.malformed, stats.malformed);
            stats.check_quality()
        }
        Command::ExportHoldout(a) => {
            init_logging(a.verbose);
            let map = FieldMap { key: a.key_field, code: a.code_field, language_field: a.lang_field, language: a.lang };
            let n = export_holdout(&a.input, &a.out, &map)?;
            println!("{n} holdout records");
            Ok(())
        }
        Command::ServeBaseline(a) => {
            let opts = ServeOptions { reorder_window: a.reorder, exit_after: a.exit_after, stall_after: a.stall_after };
            let stdin = std::io::stdin().lock();
            let stdout = std::io::stdout().lock();
            serve(stdin, stdout, &opts).map_err(|e| Error::io("<stdio>", e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let mut msg = format!("error: {err}");
            let mut src = std::error::Error::source(&err);
            while let Some(s) = src {
                msg.push_str(&format!("\n  caused by: {s}"));
                src = s.source();
            }
            eprintln!("{msg}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
