/* C interface for the ctxembed node-embedding toolkit. */

#ifndef CTXEMBED_H
#define CTXEMBED_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call. Non-`Ok` leaves out-parameters untouched; the
 * message behind it is available from `ctx_last_error`.
 */
typedef enum CtxStatus {
  CTX_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CTX_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CTX_STATUS_UTF8 = 2,
  /**
   * The operating system refused a file operation.
   */
  CTX_STATUS_IO = 3,
  /**
   * An input file exists but could not be understood.
   */
  CTX_STATUS_PARSE = 4,
  /**
   * Arguments or graph shape violate the operation's contract.
   */
  CTX_STATUS_INVALID = 5,
  /**
   * Iteration diverged or failed to converge.
   */
  CTX_STATUS_NUMERIC = 6,
  /**
   * An internal invariant failed; the library state is unharmed but the
   * call did nothing.
   */
  CTX_STATUS_PANIC = 7,
} CtxStatus;

/**
 * Trained vectors: one source vector per node, optionally a second
 * context vector per node.
 */
typedef struct CtxEmbedding CtxEmbedding;

/**
 * Directed or undirected graph handle.
 */
typedef struct CtxGraph CtxGraph;

/**
 * Hyperparameters for `ctx_embed`. Obtain defaults from
 * `ctx_params_default`, then override fields as needed.
 */
typedef struct CtxParams {
  /**
   * Embedding dimension (columns per vector).
   */
  size_t dim;
  /**
   * Walks started per node.
   */
  uint32_t walks;
  /**
   * Steps per walk; also the series length of the factorized walk matrix.
   */
  uint32_t walk_len;
  /**
   * Co-occurrence window.
   */
  uint32_t window;
  /**
   * Negative samples per observed pair.
   */
  uint32_t negatives;
  /**
   * Restart probability of restart walks.
   */
  double alpha;
  /**
   * Return bias of second-order walks.
   */
  double p;
  /**
   * In-out bias of second-order walks.
   */
  double q;
  /**
   * Damping of the path-count series; zero or negative selects the
   * automatic spectral rule.
   */
  double beta;
  /**
   * Initial learning rate of the stochastic trainer.
   */
  double learning_rate;
  /**
   * Passes over the pair stream.
   */
  uint32_t epochs;
  /**
   * Seed for every random draw of the run.
   */
  uint64_t seed;
  /**
   * Worker threads; 0 = deterministic single-threaded.
   */
  uint32_t threads;
} CtxParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ctx_version(void);

/**
 * Message of the most recent failure on this thread; empty string when no
 * call has failed yet. The pointer stays valid until the next failing call
 * on the same thread.
 */
const char *ctx_last_error(void);

/**
 * Default hyperparameters (dimension 128, ten walks of eighty steps,
 * window ten, five negatives, automatic damping, single-threaded).
 */
struct CtxParams ctx_params_default(void);

/**
 * Loads a whitespace-separated edge list (`source target [weight]` per
 * line, `#` comments) and writes a new graph handle to `out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum CtxStatus ctx_graph_load(const char *path, bool directed, struct CtxGraph **out);

/**
 * Releases a graph handle. Null is a no-op.
 *
 * # Safety
 * `g` must be null or a handle obtained from `ctx_graph_load`, not yet
 * freed.
 */
void ctx_graph_free(struct CtxGraph *g);

/**
 * Number of nodes; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
uint64_t ctx_graph_node_count(const struct CtxGraph *g);

/**
 * Number of logical edges (arcs when directed); 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
uint64_t ctx_graph_edge_count(const struct CtxGraph *g);

/**
 * Whether the graph was loaded as directed; false for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
bool ctx_graph_is_directed(const struct CtxGraph *g);

/**
 * Trains vectors for `method` (one of: deepwalk, node2vec, line1, line2,
 * line12, app, verse, netmf, hope) and writes a new embedding handle to
 * `out`. A null `params` uses the defaults. The graph is only borrowed
 * for the duration of the call.
 *
 * # Safety
 * `g` must be a live graph handle; `method` a NUL-terminated string;
 * `params` null or a valid pointer; `out` a valid pointer.
 */
enum CtxStatus ctx_embed(const struct CtxGraph *g,
                         const char *method,
                         const struct CtxParams *params,
                         struct CtxEmbedding **out);

/**
 * Releases an embedding handle. Null is a no-op.
 *
 * # Safety
 * `e` must be null or a handle obtained from `ctx_embed`, not yet freed.
 */
void ctx_embedding_free(struct CtxEmbedding *e);

/**
 * Number of embedded nodes; 0 for a null handle.
 *
 * # Safety
 * `e` must be null or a live embedding handle.
 */
uint64_t ctx_embedding_node_count(const struct CtxEmbedding *e);

/**
 * Vector dimension; 0 for a null handle.
 *
 * # Safety
 * `e` must be null or a live embedding handle.
 */
uint32_t ctx_embedding_dim(const struct CtxEmbedding *e);

/**
 * Whether the method trained separate context vectors; false for a null
 * handle.
 *
 * # Safety
 * `e` must be null or a live embedding handle.
 */
bool ctx_embedding_has_context(const struct CtxEmbedding *e);

/**
 * Copies one node's vector (source side, or context side when `context`
 * is true) into `out`, which must hold exactly `len` = dimension floats.
 *
 * # Safety
 * `e` must be a live embedding handle; `out` must point at `len` floats.
 */
enum CtxStatus ctx_embedding_copy_vector(const struct CtxEmbedding *e,
                                         uint32_t node,
                                         bool context,
                                         float *out,
                                         size_t len);

/**
 * Scores a candidate edge (source, target): dot product of the source
 * vectors, or of source and context vector when `use_context` is true.
 * Writes the score to `out`.
 *
 * # Safety
 * `e` must be a live embedding handle; `out` a valid pointer.
 */
enum CtxStatus ctx_embedding_score(const struct CtxEmbedding *e,
                                   uint32_t source,
                                   uint32_t target,
                                   bool use_context,
                                   double *out);

/**
 * Writes the vectors as text (`node_count dim` header, then
 * `original_id v1 .. vd` per line) at `path`; context vectors, when
 * present, go to the same path with a `.ctx` suffix appended. `g` must be
 * the graph the embedding was trained on — it supplies the original node
 * identifiers.
 *
 * # Safety
 * `e` and `g` must be live handles; `path` a NUL-terminated string.
 */
enum CtxStatus ctx_embedding_save(const struct CtxEmbedding *e,
                                  const struct CtxGraph *g,
                                  const char *path);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CTXEMBED_H */
