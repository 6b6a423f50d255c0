//! C ABI over `forge-core`.
//!
//! Every fallible call returns a [`ForgeStatus`]; on failure the message is
//! available from [`forge_last_error`] on the same thread. Strings returned
//! through `char **` out-parameters are owned by the caller and must be
//! released with [`forge_string_free`]. Handles are opaque and released with
//! their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use forge_core::config::PipelineConfig;
use forge_core::consistency::baseline_score;
use forge_core::filters::{CleanOutcome, FilterConfig, FilterEngine, FilterId};
use forge_core::ingest::RawSourceFile;
use forge_core::pipeline::{run_pipeline, RunOptions, Stage};
use forge_core::syntax::extract_file;
use forge_core::{Error, LanguageId};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForgeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    StageError = 4,
    DataQuality = 5,
    Error = 6,
    Panic = 7,
}

/// Compiled docstring filters.
pub struct ForgeFilterEngine {
    engine: FilterEngine,
}

/// A pipeline configuration that can be adjusted and run.
pub struct ForgePipeline {
    config: PipelineConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("NULs removed")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(ForgeStatus, String);

impl From<Error> for Fail {
    fn from(err: Error) -> Self {
        let status = match (&err, err.exit_code()) {
            (_, 2) => ForgeStatus::ConfigError,
            (_, 4) => ForgeStatus::DataQuality,
            (Error::Stage { .. }, _) => ForgeStatus::StageError,
            _ => ForgeStatus::Error,
        };
        let mut msg = err.to_string();
        let mut src = std::error::Error::source(&err);
        while let Some(s) = src {
            msg.push_str(&format!(": {s}"));
            src = s.source();
        }
        Fail(status, msg)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ForgeStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ForgeStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            ForgeStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(ForgeStatus::NullPointer, format!("`{name}` is NULL")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(ForgeStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, name).map(Some)
    }
}

fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    // SAFETY: callers pass either NULL or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| Fail(ForgeStatus::NullPointer, format!("`{name}` is NULL")))
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("NULs removed").into_raw()
}

fn config_error(msg: impl Into<String>) -> Fail {
    Fail(ForgeStatus::ConfigError, msg.into())
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn forge_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn forge_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn forge_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Name of filter `id` (0..13), statically allocated; NULL when out of range.
#[no_mangle]
pub extern "C" fn forge_filter_name(id: i32) -> *const c_char {
    const NAMES: [&str; 13] = [
        "StripDelimiters\0",
        "StripHyperlink\0",
        "StripEmbeddedCode\0",
        "StripMathFormulas\0",
        "StripMetadataTags\0",
        "StripHtmlTags\0",
        "HandleExamplesNotes\0",
        "HandleQuestions\0",
        "RemoveEmpty\0",
        "RemoveBadLength\0",
        "RemoveNonEnglish\0",
        "RemoveAutoGen\0",
        "RemoveWip\0",
    ];
    usize::try_from(id).ok().and_then(|i| NAMES.get(i)).map_or(ptr::null(), |n| n.as_ptr().cast())
}

fn filter_index(id: FilterId) -> i32 {
    FilterId::ALL.iter().position(|f| *f == id).expect("known filter") as i32
}

/// Create a filter engine from a TOML catalog, or the defaults when `toml`
/// is NULL.
///
/// # Safety
/// `toml` is NULL or a NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn forge_filter_engine_new(toml: *const c_char, out: *mut *mut ForgeFilterEngine) -> ForgeStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let config = match opt_str_arg(toml, "toml")? {
            Some(t) => FilterConfig::from_toml_str(t)?,
            None => FilterConfig::default(),
        };
        config.validate()?;
        *out = Box::into_raw(Box::new(ForgeFilterEngine { engine: FilterEngine::new(config) }));
        Ok(())
    })
}

/// # Safety
/// `engine` is NULL or a handle from [`forge_filter_engine_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn forge_filter_engine_free(engine: *mut ForgeFilterEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Clean one docstring. On return `*out_removed_by` is -1 when the docstring
/// survives (and `*out_text` holds the cleaned text) or the index of the
/// removing filter (and `*out_text` is NULL). Bit `i` of `*out_applied` is
/// set when update filter `i` changed the text. `out_applied` may be NULL.
///
/// # Safety
/// `engine` is a live handle; `docstring` is NUL-terminated; the out
/// pointers are valid.
#[no_mangle]
pub unsafe extern "C" fn forge_filter_clean(
    engine: *const ForgeFilterEngine,
    docstring: *const c_char,
    out_text: *mut *mut c_char,
    out_removed_by: *mut i32,
    out_applied: *mut u32,
) -> ForgeStatus {
    guard(|| {
        let engine = engine.as_ref().ok_or_else(|| Fail(ForgeStatus::NullPointer, "`engine` is NULL".into()))?;
        let out_text = out_arg(out_text, "out_text")?;
        let out_removed_by = out_arg(out_removed_by, "out_removed_by")?;
        *out_text = ptr::null_mut();
        let text = str_arg(docstring, "docstring")?;
        let (cleaned, applied) = engine.engine.apply_update(text);
        let tokens = forge_core::syntax::tokenize_text(&cleaned);
        match engine.engine.apply_remove(&tokens, &cleaned) {
            forge_core::filters::Verdict::Keep => {
                *out_removed_by = -1;
                *out_text = to_c(cleaned);
            }
            forge_core::filters::Verdict::Drop(id) => *out_removed_by = filter_index(id),
        }
        if let Some(mask) = out_applied.as_mut() {
            *mask = applied.into_iter().fold(0, |m, id| m | (1 << filter_index(id)));
        }
        Ok(())
    })
}

/// Clean an inline comment with the inline length bounds; same outputs as
/// [`forge_filter_clean`] without the applied mask.
///
/// # Safety
/// As for [`forge_filter_clean`].
#[no_mangle]
pub unsafe extern "C" fn forge_filter_clean_inline(
    engine: *const ForgeFilterEngine,
    comment: *const c_char,
    out_text: *mut *mut c_char,
    out_removed_by: *mut i32,
) -> ForgeStatus {
    guard(|| {
        let engine = engine.as_ref().ok_or_else(|| Fail(ForgeStatus::NullPointer, "`engine` is NULL".into()))?;
        let out_text = out_arg(out_text, "out_text")?;
        let out_removed_by = out_arg(out_removed_by, "out_removed_by")?;
        *out_text = ptr::null_mut();
        let text = str_arg(comment, "comment")?;
        let sample = forge_core::syntax::InlineSample {
            repo_id: String::new(),
            rel_path: String::new(),
            language: LanguageId::Python,
            comment: text.to_string(),
            comment_tokens: forge_core::syntax::tokenize_text(text),
            prev_context: String::new(),
            next_context: String::new(),
            enclosing_identifier: None,
            comment_span: (0, 0),
        };
        match engine.engine.clean_inline(&sample) {
            CleanOutcome::Kept(s, _) => {
                *out_removed_by = -1;
                *out_text = to_c(s.comment);
            }
            CleanOutcome::Dropped(t) => *out_removed_by = t.removed_by.map_or(-1, filter_index),
        }
        Ok(())
    })
}

/// Extract units and inline comments from one source text. `*out_json`
/// receives `{"units": [...], "inline": [...], "dropped": [...]}`.
///
/// # Safety
/// `language` and `source` are NUL-terminated; `out_json` is valid.
#[no_mangle]
pub unsafe extern "C" fn forge_extract(
    language: *const c_char,
    source: *const c_char,
    out_json: *mut *mut c_char,
) -> ForgeStatus {
    guard(|| {
        let out = out_arg(out_json, "out_json")?;
        *out = ptr::null_mut();
        let lang: LanguageId = str_arg(language, "language")?.parse().map_err(config_error)?;
        let src = str_arg(source, "source")?;
        let file = RawSourceFile::new("", "", lang, src.to_string());
        let x = extract_file(&file)?;
        let json = serde_json::json!({"units": x.units.units, "inline": x.inline.samples, "dropped": x.units.dropped});
        *out = to_c(json.to_string());
        Ok(())
    })
}

/// Lexical consistency score of a code/docstring pair, in [0, 1].
///
/// # Safety
/// `code` and `docstring` are NUL-terminated; `out` is valid.
#[no_mangle]
pub unsafe extern "C" fn forge_baseline_score(code: *const c_char, docstring: *const c_char, out: *mut f64) -> ForgeStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = baseline_score(str_arg(code, "code")?, str_arg(docstring, "docstring")?);
        Ok(())
    })
}

/// Create a pipeline from TOML text. Relative paths resolve against
/// `base_dir` when it is not NULL.
///
/// # Safety
/// `toml` is NUL-terminated, `base_dir` NULL or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn forge_pipeline_new(
    toml: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut ForgePipeline,
) -> ForgeStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(toml, "toml")?;
        let mut config = PipelineConfig::from_toml_str(text)?;
        if let Some(base) = opt_str_arg(base_dir, "base_dir")? {
            let base = PathBuf::from(base);
            let fix = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            };
            config.roots.iter_mut().for_each(fix);
            config.holdout.iter_mut().for_each(fix);
            config.filters.iter_mut().for_each(fix);
            fix(&mut config.out);
        }
        *out = Box::into_raw(Box::new(ForgePipeline { config }));
        Ok(())
    })
}

/// # Safety
/// `p` is NULL or a handle from [`forge_pipeline_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn forge_pipeline_free(p: *mut ForgePipeline) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` is a live handle; `out_dir` is NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn forge_pipeline_set_out(p: *mut ForgePipeline, out_dir: *const c_char) -> ForgeStatus {
    guard(|| {
        let p = p.as_mut().ok_or_else(|| Fail(ForgeStatus::NullPointer, "`p` is NULL".into()))?;
        p.config.out = PathBuf::from(str_arg(out_dir, "out_dir")?);
        Ok(())
    })
}

/// # Safety
/// `p` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn forge_pipeline_set_seed(p: *mut ForgePipeline, seed: u64) -> ForgeStatus {
    guard(|| {
        let p = p.as_mut().ok_or_else(|| Fail(ForgeStatus::NullPointer, "`p` is NULL".into()))?;
        p.config.seed = seed;
        Ok(())
    })
}

/// Run up to stage `until` (NULL for every stage: ingest, extract, clean,
/// score, dedup, split, stats). With `resume` non-zero, finished stages with
/// a matching configuration are skipped. `*out_manifest` (may be NULL)
/// receives the run manifest as JSON.
///
/// # Safety
/// `p` is a live handle; `until` NULL or NUL-terminated; `out_manifest`
/// NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn forge_pipeline_run(
    p: *const ForgePipeline,
    until: *const c_char,
    resume: i32,
    out_manifest: *mut *mut c_char,
) -> ForgeStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| Fail(ForgeStatus::NullPointer, "`p` is NULL".into()))?;
        if let Some(o) = out_manifest.as_mut() {
            *o = ptr::null_mut();
        }
        let until = match opt_str_arg(until, "until")? {
            Some(s) => s.parse::<Stage>().map_err(config_error)?,
            None => Stage::Stats,
        };
        let manifest = run_pipeline(&p.config, &RunOptions { until, resume: resume != 0, dump_raw: None })?;
        if let Some(o) = out_manifest.as_mut() {
            *o = to_c(serde_json::to_string(&manifest).map_err(Error::from)?);
        }
        Ok(())
    })
}
