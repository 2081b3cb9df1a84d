/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef WGRAPHLETS_H
#define WGRAPHLETS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WgMeasure {
  WG_MEASURE_GRAPHLET35 = 0,
  WG_MEASURE_ORDERED34 = 1,
  WG_MEASURE_EGDVM = 2,
  WG_MEASURE_EGDVM_CC = 3,
  WG_MEASURE_WEGDVM = 4,
  WG_MEASURE_WEGDVM_CC = 5,
} WgMeasure;

typedef enum WgStatistic {
  WG_STATISTIC_CRAMER_VON_MISES = 0,
  WG_STATISTIC_SUM = 1,
} WgStatistic;

/**
 * Result code of every fallible call.
 */
typedef enum WgStatus {
  WG_STATUS_OK = 0,
  WG_STATUS_NULL_ARGUMENT = 1,
  WG_STATUS_INVALID_UTF8 = 2,
  WG_STATUS_INVALID_ARGUMENT = 3,
  WG_STATUS_PARSE = 4,
  WG_STATUS_CHAIN_NOT_FOUND = 5,
  WG_STATUS_DEGENERATE = 6,
  WG_STATUS_BUFFER_TOO_SMALL = 7,
  WG_STATUS_IO = 8,
  WG_STATUS_INTERNAL = 9,
} WgStatus;

/**
 * Row-major real matrix.
 */
typedef struct WgMatrix WgMatrix;

/**
 * Weighted protein structure network.
 */
typedef struct WgPsn WgPsn;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *wg_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wg_version(void);

/**
 * Builds a PSN from PDB-format text.
 *
 * `range` is an optional author-numbered interval such as `"10-120"` and
 * may be NULL. `cutoff` is in angstroms. On success `*out` receives a
 * handle to release with `wg_psn_free`.
 *
 * # Safety
 * `pdb_text` and a non-NULL `range` must be NUL-terminated strings; `out`
 * must be writable.
 */
enum WgStatus wg_psn_from_pdb(const char *pdb_text,
                              char chain,
                              const char *range,
                              double cutoff,
                              struct WgPsn **out);

/**
 * # Safety
 * `psn` must be NULL or a handle from `wg_psn_from_pdb` not yet freed.
 */
void wg_psn_free(struct WgPsn *psn);

/**
 * Residue count, or 0 for NULL.
 *
 * # Safety
 * `psn` must be NULL or a live handle.
 */
size_t wg_psn_node_count(const struct WgPsn *psn);

/**
 * Contact count, or 0 for NULL.
 *
 * # Safety
 * `psn` must be NULL or a live handle.
 */
size_t wg_psn_edge_count(const struct WgPsn *psn);

/**
 * Copies the edge list. `endpoints` receives `2 * edge_count` zero-based
 * node indices and `weights` receives `edge_count` values; either may be
 * NULL to skip it. `capacity` counts edges.
 *
 * # Safety
 * Non-NULL buffers must hold at least `capacity` edges.
 */
enum WgStatus wg_psn_edges(const struct WgPsn *psn,
                           uint32_t *endpoints,
                           double *weights,
                           size_t capacity);

/**
 * Length of a vector measure, or 0 for the matrix measures.
 */
size_t wg_measure_len(enum WgMeasure measure);

/**
 * Computes a vector measure into `out`. `*written` receives its length.
 *
 * # Safety
 * `out` must hold `capacity` doubles; `written` may be NULL.
 */
enum WgStatus wg_measure_vector(const struct WgPsn *psn,
                                enum WgMeasure measure,
                                enum WgStatistic statistic,
                                double *out,
                                size_t capacity,
                                size_t *written);

/**
 * Computes a matrix measure (one row per edge, 68 columns).
 *
 * # Safety
 * `out` must be writable; release the result with `wg_matrix_free`.
 */
enum WgStatus wg_measure_matrix(const struct WgPsn *psn,
                                enum WgMeasure measure,
                                enum WgStatistic statistic,
                                struct WgMatrix **out);

/**
 * # Safety
 * `m` must be NULL or a live matrix handle.
 */
size_t wg_matrix_rows(const struct WgMatrix *m);

/**
 * # Safety
 * `m` must be NULL or a live matrix handle.
 */
size_t wg_matrix_cols(const struct WgMatrix *m);

/**
 * Row-major data, `rows * cols` values, owned by the handle.
 *
 * # Safety
 * `m` must be NULL or a live matrix handle.
 */
const double *wg_matrix_data(const struct WgMatrix *m);

/**
 * # Safety
 * `m` must be NULL or a matrix handle not yet freed.
 */
void wg_matrix_free(struct WgMatrix *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WGRAPHLETS_H */
