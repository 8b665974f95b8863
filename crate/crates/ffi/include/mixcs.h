#ifndef MIXCS_H
#define MIXCS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MixcsStatus {
  MIXCS_STATUS_OK = 0,
  MIXCS_STATUS_NULL_POINTER = 1,
  MIXCS_STATUS_INVALID_ARGUMENT = 2,
  MIXCS_STATUS_TOO_LARGE = 3,
  MIXCS_STATUS_RANK_DEFICIENT = 4,
  MIXCS_STATUS_NUMERICAL = 5,
  MIXCS_STATUS_FORMAT = 6,
  MIXCS_STATUS_IO = 7,
  MIXCS_STATUS_PANIC = 8,
} MixcsStatus;

typedef enum MixcsEnsemble {
  MIXCS_ENSEMBLE_GAUSSIAN = 0,
  MIXCS_ENSEMBLE_BERNOULLI = 1,
  MIXCS_ENSEMBLE_S_MIXED = 2,
  MIXCS_ENSEMBLE_S_BERNOULLI = 3,
} MixcsEnsemble;

typedef enum MixcsSolveStatus {
  MIXCS_SOLVE_STATUS_CONVERGED = 0,
  MIXCS_SOLVE_STATUS_MAX_ITER = 1,
  MIXCS_SOLVE_STATUS_INFEASIBLE = 2,
} MixcsSolveStatus;

typedef enum MixcsSupportCase {
  MIXCS_SUPPORT_CASE_DIAG_INSIDE = 0,
  MIXCS_SUPPORT_CASE_OFF_DIAG = 1,
  MIXCS_SUPPORT_CASE_MIXED_BOUNDARY = 2,
} MixcsSupportCase;

/**
 * Opaque measurement matrix.
 */
typedef struct MixcsMatrix MixcsMatrix;

typedef struct MixcsRipResult {
  double delta;
  double gram_min;
  double gram_max;
  uint64_t supports_examined;
} MixcsRipResult;

typedef struct MixcsRecoveryInfo {
  double objective;
  double residual;
  uint64_t iterations;
  enum MixcsSolveStatus status;
  /**
   * NaN when no certificate was produced.
   */
  double certificate_gap;
} MixcsRecoveryInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mixcs_version(void);

/**
 * Message of the last failure on this thread. Valid until the next failing
 * call on the same thread; empty if nothing failed yet.
 */
const char *mixcs_last_error_message(void);

/**
 * Samples a scaled `n × cols` measurement matrix.
 */
enum MixcsStatus mixcs_matrix_generate(enum MixcsEnsemble ensemble,
                                       size_t n,
                                       size_t cols,
                                       uint64_t seed,
                                       struct MixcsMatrix **out);

/**
 * Copies `rows · cols` row-major entries into a new matrix with scaling 1.
 */
enum MixcsStatus mixcs_matrix_from_rows(const double *data,
                                        size_t rows,
                                        size_t cols,
                                        struct MixcsMatrix **out);

/**
 * Reads a CSMAT1 file.
 */
enum MixcsStatus mixcs_matrix_load(const char *path, struct MixcsMatrix **out);

/**
 * Writes a CSMAT1 file.
 */
enum MixcsStatus mixcs_matrix_save(const struct MixcsMatrix *m, const char *path);

enum MixcsStatus mixcs_matrix_dims(const struct MixcsMatrix *m, size_t *rows, size_t *cols);

/**
 * Copies the row-major entries into `buf`, which must hold `rows · cols`
 * values.
 */
enum MixcsStatus mixcs_matrix_copy_entries(const struct MixcsMatrix *m, double *buf, size_t len);

/**
 * Releases a handle. Null is ignored.
 */
void mixcs_matrix_free(struct MixcsMatrix *m);

/**
 * Exact `δ_k` over all `k`-supports. `witness` may be null or hold `k`
 * indices.
 */
enum MixcsStatus mixcs_rip_exhaustive(const struct MixcsMatrix *m,
                                      size_t k,
                                      struct MixcsRipResult *out,
                                      size_t *witness);

/**
 * Lower bound on `δ_k` from `trials` random supports.
 */
enum MixcsStatus mixcs_rip_monte_carlo(const struct MixcsMatrix *m,
                                       size_t k,
                                       uint64_t trials,
                                       uint64_t seed,
                                       struct MixcsRipResult *out,
                                       size_t *witness);

/**
 * `min ‖x‖₁ s.t. Φx = y`. `x_out` must hold `cols` values; `info` may be
 * null.
 */
enum MixcsStatus mixcs_basis_pursuit(const struct MixcsMatrix *m,
                                     const double *y,
                                     size_t y_len,
                                     double tol,
                                     size_t max_iter,
                                     double *x_out,
                                     size_t x_len,
                                     struct MixcsRecoveryInfo *info);

/**
 * `min ‖x‖₁ s.t. ‖Φx − y‖₂ ≤ eps`.
 */
enum MixcsStatus mixcs_bpdn(const struct MixcsMatrix *m,
                            const double *y,
                            size_t y_len,
                            double eps,
                            double tol,
                            size_t max_iter,
                            double *x_out,
                            size_t x_len,
                            struct MixcsRecoveryInfo *info);

/**
 * Admissible σ² range `[lo, hi]` for one support case. `feasible` is
 * set to 1 when `lo ≤ hi`.
 */
enum MixcsStatus mixcs_sigma_interval(double gamma,
                                      double delta,
                                      enum MixcsSupportCase case_,
                                      double *lo,
                                      double *hi,
                                      int32_t *feasible);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIXCS_H */
