/* C interface to gbs-core: graphs of infinite cyclic groups,
 * deformation moves, words, and accessibility bounds. */

#ifndef GBS_H
#define GBS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a fallible call.
 */
typedef enum GbsStatus {
  /**
   * The call succeeded and the out-parameters are filled in.
   */
  GbsStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  GbsStatus_NullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  GbsStatus_InvalidUtf8 = 2,
  /**
   * The input was well-formed but wrong (parse error, invalid graph,
   * impossible request). `gbs_last_error_message` has the details.
   */
  GbsStatus_Domain = 3,
} GbsStatus;

/**
 * An opaque parsed graph.
 */
typedef struct GbsGraphHandle GbsGraphHandle;

/**
 * An opaque parsed word (a based loop in some graph).
 */
typedef struct GbsWordHandle GbsWordHandle;

/**
 * The accessibility bound report for a 2-complex.
 */
typedef struct GbsBoundReport {
  /**
   * Complexity: twice the mod-2 first cohomology dimension, plus the
   * 0-cell and 2-cell counts.
   */
  uint64_t delta;
  /**
   * The caller-supplied first Betti number.
   */
  uint64_t beta1;
  /**
   * delta + beta1.
   */
  uint64_t vertex_bound;
  /**
   * vertex_bound - 1 + beta1.
   */
  uint64_t edge_bound;
  /**
   * vertex_bound + edge_bound.
   */
  uint64_t total_bound;
  /**
   * 4*delta + 9*beta1 - 5; may be negative.
   */
  int64_t bf_vertex_bound;
} GbsBoundReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the most recent `Domain` failure on this thread, or an
 * empty string. The caller owns the returned string; release it with
 * `gbs_string_free`.
 */
char *gbs_last_error_message(void);

/**
 * Releases a string returned by this library. Accepts null.
 *
 * # Safety
 * `s` must be null or a string returned by this library that has not been
 * freed yet.
 */
void gbs_string_free(char *s);

/**
 * Parses and validates a graph from its text format (`vertex` and `edge`
 * lines). On `Ok`, `*out` owns the new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum GbsStatus gbs_graph_parse(const char *text, struct GbsGraphHandle **out);

/**
 * Releases a graph handle. Accepts null.
 *
 * # Safety
 * `g` must be null or an unfreed handle from this library.
 */
void gbs_graph_free(struct GbsGraphHandle *g);

/**
 * Renders the graph back to its text format.
 *
 * # Safety
 * `g` must be a valid handle; `out` must be a valid pointer.
 */
enum GbsStatus gbs_graph_to_text(const struct GbsGraphHandle *g, char **out);

/**
 * Number of vertices; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a valid handle.
 */
uint64_t gbs_graph_vertex_count(const struct GbsGraphHandle *g);

/**
 * Number of edges; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a valid handle.
 */
uint64_t gbs_graph_edge_count(const struct GbsGraphHandle *g);

/**
 * Whether no non-loop edge end is labeled 1 or -1 (so no collapse applies).
 *
 * # Safety
 * `g` must be a valid handle; `out` must be a valid pointer.
 */
enum GbsStatus gbs_graph_is_reduced(const struct GbsGraphHandle *g, bool *out);

/**
 * Collapses unit-label edges until the graph is reduced, leaving the input
 * untouched. On `Ok`, `*out` owns the reduced copy.
 *
 * # Safety
 * `g` must be a valid handle; `out` must be a valid pointer.
 */
enum GbsStatus gbs_graph_reduce(const struct GbsGraphHandle *g, struct GbsGraphHandle **out);

/**
 * Parses one `word <base>: <exponent> [<edge> <exponent>]...` line.
 *
 * # Safety
 * `line` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum GbsStatus gbs_word_parse(const char *line, struct GbsWordHandle **out);

/**
 * Releases a word handle. Accepts null.
 *
 * # Safety
 * `w` must be null or an unfreed handle from this library.
 */
void gbs_word_free(struct GbsWordHandle *w);

/**
 * Renders the word back to its one-line text format.
 *
 * # Safety
 * `w` must be a valid handle; `out` must be a valid pointer.
 */
enum GbsStatus gbs_word_to_text(const struct GbsWordHandle *w, char **out);

/**
 * Britton-reduces the word over the graph. On `Ok`, `*out` owns the
 * reduced copy.
 *
 * # Safety
 * `g` and `w` must be valid handles; `out` must be a valid pointer.
 */
enum GbsStatus gbs_word_reduce(const struct GbsGraphHandle *g,
                               const struct GbsWordHandle *w,
                               struct GbsWordHandle **out);

/**
 * Whether the element fixes a point of the tree.
 *
 * # Safety
 * `g` and `w` must be valid handles; `out` must be a valid pointer.
 */
enum GbsStatus gbs_word_is_elliptic(const struct GbsGraphHandle *g,
                                    const struct GbsWordHandle *w,
                                    bool *out);

/**
 * Translation length on the tree: 0 exactly for elliptic elements.
 *
 * # Safety
 * `g` and `w` must be valid handles; `out` must be a valid pointer.
 */
enum GbsStatus gbs_word_translation_length(const struct GbsGraphHandle *g,
                                           const struct GbsWordHandle *w,
                                           uint64_t *out);

/**
 * Parses a 2-complex from its text format (`cell0` / `cell1` / `cell2`
 * lines) and fills in the bound report for the given first Betti number.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum GbsStatus gbs_bound_report(const char *text, uint64_t beta1, struct GbsBoundReport *out);

/**
 * Verifies the distinguished valence-5 chain family for lengths 1 through
 * `kmax`: returns `Ok` when every member passes, `Domain` (with a message)
 * otherwise.
 */
enum GbsStatus gbs_verify_family(uint64_t kmax);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GBS_H */
