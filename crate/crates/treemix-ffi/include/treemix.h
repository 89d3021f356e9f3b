/* C interface to the treemix library. */

#ifndef TREEMIX_H
#define TREEMIX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every treemix FFI call.
 */
typedef enum TmxStatus {
  /**
   * Success.
   */
  TmxOk = 0,
  /**
   * A parameter or data value was outside its mathematical domain.
   */
  TmxErrDomain = 1,
  /**
   * Arguments were structurally inconsistent (sizes, ranges, handles).
   */
  TmxErrContract = 2,
  /**
   * A string argument failed to parse.
   */
  TmxErrParse = 3,
  /**
   * An I/O operation failed.
   */
  TmxErrIo = 4,
  /**
   * A required pointer argument was NULL.
   */
  TmxErrNull = 5,
  /**
   * The library panicked; the handle states are unchanged.
   */
  TmxErrPanic = 6,
} TmxStatus;

/**
 * Opaque sampler-chain handle.
 */
typedef struct TmxChain TmxChain;

/**
 * Opaque block-maxima dataset handle.
 */
typedef struct TmxDataset TmxDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the most recent failure on this thread into `buf`
 * (NUL-terminated, truncated to `len` bytes). Returns the full message
 * length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be NULL (to query the length only) or point to `len` writable
 * bytes.
 */
uintptr_t tmx_last_error(char *buf, uintptr_t len);

/**
 * Builds a dataset from a row-major `rows` x `cols` array of strictly
 * positive unit-Frechet block maxima.
 *
 * # Safety
 * `values` must point to `rows * cols` readable f64 values; `out` must be a
 * valid pointer. The returned handle must be released with
 * `tmx_dataset_free`.
 */
enum TmxStatus tmx_dataset_new(const double *values,
                               uintptr_t rows,
                               uintptr_t cols,
                               struct TmxDataset **out);

/**
 * Reads a dataset from a block-maxima CSV file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. The returned handle must be released with `tmx_dataset_free`.
 */
enum TmxStatus tmx_dataset_read_csv(const char *path, struct TmxDataset **out);

/**
 * Releases a dataset handle; NULL is ignored.
 *
 * # Safety
 * `ds` must be NULL or a handle produced by this library and not yet freed.
 */
void tmx_dataset_free(struct TmxDataset *ds);

/**
 * Number of rows, or 0 for a NULL handle.
 *
 * # Safety
 * `ds` must be NULL or a valid dataset handle.
 */
uintptr_t tmx_dataset_rows(const struct TmxDataset *ds);

/**
 * Number of columns, or 0 for a NULL handle.
 *
 * # Safety
 * `ds` must be NULL or a valid dataset handle.
 */
uintptr_t tmx_dataset_cols(const struct TmxDataset *ds);

/**
 * Draws `count` nested-logistic block maxima under (`tree`, alpha0, alphas).
 *
 * # Safety
 * `tree` must be a valid NUL-terminated string; `alphas` must hold one value
 * per tree cluster (`n_clusters` of them); `out` must be a valid pointer.
 */
enum TmxStatus tmx_simulate_nested_logistic(const char *tree,
                                            double alpha0,
                                            const double *alphas,
                                            uintptr_t n_clusters,
                                            uintptr_t count,
                                            uint64_t seed,
                                            struct TmxDataset **out);

/**
 * Log density of one observation `m` (length `d`) under the model.
 *
 * # Safety
 * `tree` must be a valid NUL-terminated string; `alphas` must hold
 * `n_clusters` values; `m` must hold `d` values; `out` must be valid.
 */
enum TmxStatus tmx_log_density(const char *tree,
                               double alpha0,
                               const double *alphas,
                               uintptr_t n_clusters,
                               const double *m,
                               uintptr_t d,
                               double *out);

/**
 * Log likelihood of a dataset under the model.
 *
 * # Safety
 * `ds` must be a valid dataset handle; `tree` a valid NUL-terminated string;
 * `alphas` must hold `n_clusters` values; `out` must be valid.
 */
enum TmxStatus tmx_log_likelihood(const struct TmxDataset *ds,
                                  const char *tree,
                                  double alpha0,
                                  const double *alphas,
                                  uintptr_t n_clusters,
                                  double *out);

/**
 * Extremal coefficient of all variables under the model.
 *
 * # Safety
 * `tree` must be a valid NUL-terminated string; `alphas` must hold
 * `n_clusters` values; `out` must be valid.
 */
enum TmxStatus tmx_extremal_coefficient(const char *tree,
                                        double alpha0,
                                        const double *alphas,
                                        uintptr_t n_clusters,
                                        double *out);

/**
 * Fixed-tree Metropolis-Hastings fit; `burnin` only annotates the chain.
 *
 * # Safety
 * `ds` must be a valid dataset handle; `tree` a valid NUL-terminated string;
 * `out` must be valid. The returned handle must be released with
 * `tmx_chain_free`.
 */
enum TmxStatus tmx_fit_fixed_tree(const struct TmxDataset *ds,
                                  const char *tree,
                                  uint64_t iters,
                                  uint64_t burnin,
                                  uint64_t seed,
                                  struct TmxChain **out);

/**
 * Tree-mixture reversible-jump fit; `burnin` bounds the adaptation phase
 * and annotates the chain.
 *
 * # Safety
 * `ds` must be a valid dataset handle; `out` must be valid. The returned
 * handle must be released with `tmx_chain_free`.
 */
enum TmxStatus tmx_fit_tree_mixture(const struct TmxDataset *ds,
                                    uint64_t iters,
                                    uint64_t burnin,
                                    uint64_t seed,
                                    struct TmxChain **out);

/**
 * Releases a chain handle; NULL is ignored.
 *
 * # Safety
 * `chain` must be NULL or a handle produced by this library and not freed.
 */
void tmx_chain_free(struct TmxChain *chain);

/**
 * Number of recorded iterations, or 0 for a NULL handle.
 *
 * # Safety
 * `chain` must be NULL or a valid chain handle.
 */
uintptr_t tmx_chain_len(const struct TmxChain *chain);

/**
 * Writes the chain's post-burn-in modal tree in text form into `buf`
 * (NUL-terminated, truncated to `len` bytes).
 *
 * # Safety
 * `chain` must be a valid chain handle; `buf` must point to `len` writable
 * bytes.
 */
enum TmxStatus tmx_chain_modal_tree(const struct TmxChain *chain, char *buf, uintptr_t len);

/**
 * Writes a chain to an NDJSON file.
 *
 * # Safety
 * `chain` must be a valid chain handle; `path` a valid NUL-terminated
 * string.
 */
enum TmxStatus tmx_chain_write_ndjson(const struct TmxChain *chain, const char *path);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TREEMIX_H */
