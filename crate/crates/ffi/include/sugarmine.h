#ifndef SUGARMINE_H
#define SUGARMINE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Node labeling applied to methods added to a miner.
 */
typedef enum {
  SM_MODE_GENERALIZED = 0,
  SM_MODE_BASELINE = 1,
} SmMode;

typedef enum {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_ARGUMENT = 1,
  SM_STATUS_INVALID_UTF8 = 2,
  SM_STATUS_PARSE_ERROR = 3,
  SM_STATUS_INVALID_ARGUMENT = 4,
  SM_STATUS_INTERNAL = 5,
} SmStatus;

/**
 * Accumulates labeled method CFGs to mine over.
 */
typedef struct SmMiner SmMiner;

/**
 * Result of one mining run, in size/support/canonical order.
 */
typedef struct SmPatternSet SmPatternSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *sm_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` is null or was returned by this library and not yet freed.
 */
void sm_string_free(char *s);

/**
 * New empty miner labeling methods with `mode` (an [`SmMode`] value), or
 * NULL if `mode` is out of range.
 */
SmMiner *sm_miner_new(int32_t mode);

/**
 * # Safety
 * `miner` is null or was returned by [`sm_miner_new`] and not yet freed.
 */
void sm_miner_free(SmMiner *miner);

/**
 * Parses a Java compilation unit and adds one labeled CFG per method.
 * `file_path` only names the methods. `out_added` (nullable) receives the
 * number of methods added. A unit that does not parse is `PARSE_ERROR` and
 * adds nothing; methods the frontend cannot model are skipped silently.
 *
 * # Safety
 * `miner` is a live handle; string arguments are NUL-terminated;
 * `out_added` is null or writable.
 */
SmStatus sm_miner_add_source(SmMiner *miner,
                             const char *file_path,
                             const char *source,
                             size_t *out_added);

/**
 * Number of method CFGs held by the miner (0 for NULL).
 *
 * # Safety
 * `miner` is null or a live handle.
 */
size_t sm_miner_len(const SmMiner *miner);

/**
 * Mines patterns with `min_support_ratio` in (0, 1] and up to `max_size`
 * nodes. On success `*out` receives a new pattern set.
 *
 * # Safety
 * `miner` is a live handle; `out` is writable.
 */
SmStatus sm_miner_run(const SmMiner *miner,
                      double min_support_ratio,
                      size_t max_size,
                      SmPatternSet **out);

/**
 * # Safety
 * `set` is null or a live pattern set handle.
 */
size_t sm_pattern_set_len(const SmPatternSet *set);

/**
 * JSON object for pattern `index` (id, canonical, size, support, graph,
 * witnesses).
 *
 * # Safety
 * `set` is a live handle; `out_json` is writable.
 */
SmStatus sm_pattern_set_get_json(const SmPatternSet *set, size_t index, char **out_json);

/**
 * # Safety
 * `set` is null or a live handle not yet freed.
 */
void sm_pattern_set_free(SmPatternSet *set);

/**
 * JSON array of the raw CFGs for every method in a Java compilation unit.
 *
 * # Safety
 * `source` is NUL-terminated; `out_json` is writable.
 */
SmStatus sm_build_cfg_json(const char *source, char **out_json);

/**
 * Canonical text of a pattern given as JSON
 * (`{"nodes":[...],"edges":[{"src":0,"dst":1,"label":"TRUE"}]}`).
 *
 * # Safety
 * `pattern_json` is NUL-terminated; `out_canonical` is writable.
 */
SmStatus sm_canonical_form(const char *pattern_json, size_t max_size, char **out_canonical);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUGARMINE_H */
