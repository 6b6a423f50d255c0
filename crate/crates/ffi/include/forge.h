#ifndef FORGE_H
#define FORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum ForgeStatus {
  FORGE_STATUS_OK = 0,
  FORGE_STATUS_NULL_POINTER = 1,
  FORGE_STATUS_INVALID_UTF8 = 2,
  FORGE_STATUS_CONFIG_ERROR = 3,
  FORGE_STATUS_STAGE_ERROR = 4,
  FORGE_STATUS_DATA_QUALITY = 5,
  FORGE_STATUS_ERROR = 6,
  FORGE_STATUS_PANIC = 7,
} ForgeStatus;

/**
 * Compiled docstring filters.
 */
typedef struct ForgeFilterEngine ForgeFilterEngine;

/**
 * A pipeline configuration that can be adjusted and run.
 */
typedef struct ForgePipeline ForgePipeline;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *forge_last_error(void);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void forge_string_free(char *s);

/**
 * Library version, statically allocated.
 */
const char *forge_version(void);

/**
 * Name of filter `id` (0..13), statically allocated; NULL when out of range.
 */
const char *forge_filter_name(int32_t id);

/**
 * Create a filter engine from a TOML catalog, or the defaults when `toml`
 * is NULL.
 *
 * # Safety
 * `toml` is NULL or a NUL-terminated string; `out` is a valid pointer.
 */
enum ForgeStatus forge_filter_engine_new(const char *toml, struct ForgeFilterEngine **out);

/**
 * # Safety
 * `engine` is NULL or a handle from [`forge_filter_engine_new`], freed once.
 */
void forge_filter_engine_free(struct ForgeFilterEngine *engine);

/**
 * Clean one docstring. On return `*out_removed_by` is -1 when the docstring
 * survives (and `*out_text` holds the cleaned text) or the index of the
 * removing filter (and `*out_text` is NULL). Bit `i` of `*out_applied` is
 * set when update filter `i` changed the text. `out_applied` may be NULL.
 *
 * # Safety
 * `engine` is a live handle; `docstring` is NUL-terminated; the out
 * pointers are valid.
 */
enum ForgeStatus forge_filter_clean(const struct ForgeFilterEngine *engine,
                                    const char *docstring,
                                    char **out_text,
                                    int32_t *out_removed_by,
                                    uint32_t *out_applied);

/**
 * Clean an inline comment with the inline length bounds; same outputs as
 * [`forge_filter_clean`] without the applied mask.
 *
 * # Safety
 * As for [`forge_filter_clean`].
 */
enum ForgeStatus forge_filter_clean_inline(const struct ForgeFilterEngine *engine,
                                           const char *comment,
                                           char **out_text,
                                           int32_t *out_removed_by);

/**
 * Extract units and inline comments from one source text. `*out_json`
 * receives `{"units": [...], "inline": [...], "dropped": [...]}`.
 *
 * # Safety
 * `language` and `source` are NUL-terminated; `out_json` is valid.
 */
enum ForgeStatus forge_extract(const char *language, const char *source, char **out_json);

/**
 * Lexical consistency score of a code/docstring pair, in [0, 1].
 *
 * # Safety
 * `code` and `docstring` are NUL-terminated; `out` is valid.
 */
enum ForgeStatus forge_baseline_score(const char *code, const char *docstring, double *out);

/**
 * Create a pipeline from TOML text. Relative paths resolve against
 * `base_dir` when it is not NULL.
 *
 * # Safety
 * `toml` is NUL-terminated, `base_dir` NULL or NUL-terminated, `out` valid.
 */
enum ForgeStatus forge_pipeline_new(const char *toml,
                                    const char *base_dir,
                                    struct ForgePipeline **out);

/**
 * # Safety
 * `p` is NULL or a handle from [`forge_pipeline_new`], freed once.
 */
void forge_pipeline_free(struct ForgePipeline *p);

/**
 * # Safety
 * `p` is a live handle; `out_dir` is NUL-terminated.
 */
enum ForgeStatus forge_pipeline_set_out(struct ForgePipeline *p, const char *out_dir);

/**
 * # Safety
 * `p` is a live handle.
 */
enum ForgeStatus forge_pipeline_set_seed(struct ForgePipeline *p, uint64_t seed);

/**
 * Run up to stage `until` (NULL for every stage: ingest, extract, clean,
 * score, dedup, split, stats). With `resume` non-zero, finished stages with
 * a matching configuration are skipped. `*out_manifest` (may be NULL)
 * receives the run manifest as JSON.
 *
 * # Safety
 * `p` is a live handle; `until` NULL or NUL-terminated; `out_manifest`
 * NULL or valid.
 */
enum ForgeStatus forge_pipeline_run(const struct ForgePipeline *p,
                                    const char *until,
                                    int32_t resume,
                                    char **out_manifest);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORGE_H */
