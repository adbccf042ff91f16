#ifndef TGSAFE_H
#define TGSAFE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Line-based text document.
 */
#define TG_FORMAT_TEXT 0

/**
 * JSON document.
 */
#define TG_FORMAT_STRUCTURED 1

typedef enum TgStatus {
  TG_STATUS_OK = 0,
  TG_STATUS_NULL_ARGUMENT = 1,
  TG_STATUS_INVALID_UTF8 = 2,
  TG_STATUS_PARSE_ERROR = 3,
  TG_STATUS_UNKNOWN_VERTEX = 4,
  TG_STATUS_INVALID_ARGUMENT = 5,
  TG_STATUS_PANIC = 6,
} TgStatus;

/**
 * Opaque graph handle.
 */
typedef struct TgGraph TgGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a
 * successful call. The pointer stays valid until the next call into the
 * library from the same thread.
 */
const char *tg_last_error_message(void);

/**
 * Parses a graph document (`TG_FORMAT_TEXT` or `TG_FORMAT_STRUCTURED`).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TgStatus tg_graph_parse(const char *text, uint32_t format, struct TgGraph **out);

/**
 * Generates a random graph with the default alphabet {t, g, r} and half
 * the vertices subjects on average.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TgStatus tg_gen_random(size_t n, double density, uint64_t seed, struct TgGraph **out);

/**
 * Releases a graph handle. Null is ignored.
 *
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void tg_graph_free(struct TgGraph *g);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void tg_string_free(char *s);

/**
 * Number of vertices; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t tg_graph_vertex_count(const struct TgGraph *g);

/**
 * Number of edges; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t tg_graph_edge_count(const struct TgGraph *g);

/**
 * Serializes the graph in canonical form.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum TgStatus tg_graph_serialize(const struct TgGraph *g, uint32_t format, char **out);

/**
 * Renders the graph in Graphviz DOT.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum TgStatus tg_graph_export_dot(const struct TgGraph *g, char **out);

/**
 * Decides whether `source` can obtain `alpha` over `target`.
 *
 * # Safety
 * `g` must be a live handle, the strings NUL-terminated and `out` valid.
 */
enum TgStatus tg_can_share(const struct TgGraph *g,
                           const char *alpha,
                           const char *source,
                           const char *target,
                           bool *out);

/**
 * Like [`tg_can_share`], returning a JSON report with the answer and its
 * witness.
 *
 * # Safety
 * `g` must be a live handle, the strings NUL-terminated and `out` valid.
 */
enum TgStatus tg_analyze_json(const struct TgGraph *g,
                              const char *alpha,
                              const char *source,
                              const char *target,
                              char **out);

/**
 * Runs the rule-search oracle. `out_found` receives whether a rule
 * sequence was found, `out_exhausted` whether the search finished within
 * `step_limit` (a negative answer is only definitive when it did).
 *
 * # Safety
 * `g` must be a live handle, the strings NUL-terminated and the output
 * pointers valid.
 */
enum TgStatus tg_oracle_can_share(const struct TgGraph *g,
                                  const char *alpha,
                                  const char *source,
                                  const char *target,
                                  size_t create_budget,
                                  size_t step_limit,
                                  bool *out_found,
                                  bool *out_exhausted);

/**
 * Islands as a JSON array of `{"id", "members"}` objects.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum TgStatus tg_islands_json(const struct TgGraph *g, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TGSAFE_H */
