#ifndef MFPASS_H
#define MFPASS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MfpStatus {
  MFP_STATUS_OK = 0,
  MFP_STATUS_INVALID_ARGUMENT = 1,
  MFP_STATUS_GRID_MISMATCH = 2,
  MFP_STATUS_INVALID_FIELD = 3,
  MFP_STATUS_CONVERGENCE_FAILURE = 4,
  MFP_STATUS_NO_NEGATIVE_ENDPOINT = 5,
  MFP_STATUS_BUDGET_EXHAUSTED = 6,
  MFP_STATUS_IO = 7,
  MFP_STATUS_NULL_POINTER = 8,
  MFP_STATUS_PANIC = 9,
} MfpStatus;

typedef struct MfpField MfpField;

typedef struct MfpGrid MfpGrid;

typedef struct MfpResult MfpResult;

typedef struct MfpWeight MfpWeight;

/**
 * Solver settings; see `mfp_solver_config_default`.
 */
typedef struct MfpSolverConfig {
  size_t path_nodes;
  size_t max_outer_iters;
  double residual_tol;
  double initial_step;
  double step_shrink;
  double sufficient_decrease;
  double min_step;
  size_t endpoint_scaling_budget;
  size_t reparametrize_every;
  double climb_switch_tol;
  size_t polish_steps;
  uint64_t rng_seed;
} MfpSolverConfig;

typedef struct MfpFunctionalReport {
  double value;
  double kinetic;
  double z1;
  double z2;
  double ln_z1;
  double ln_z2;
  double grad_norm;
} MfpFunctionalReport;

typedef struct MfpGateReport {
  bool in_lambda_rho;
  bool coercive_regime;
  double mu1;
  double volume;
  double sum_margin;
  double max_margin;
} MfpGateReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *mfp_last_error_message(void);

struct MfpSolverConfig mfp_solver_config_default(void);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum MfpStatus mfp_grid_new(double side_length, size_t points_per_side, struct MfpGrid **out);

/**
 * # Safety
 * `grid` must come from `mfp_grid_new` or be null.
 */
void mfp_grid_free(struct MfpGrid *grid);

/**
 * Number of nodes, `N²`; 0 for a null grid.
 *
 * # Safety
 * `grid` must be a live handle or null.
 */
size_t mfp_grid_len(const struct MfpGrid *grid);

/**
 * Builds a weight from a preset string such as `"const:1"`,
 * `"cosine:0.5"` or `"bump:2:0.3"`.
 *
 * # Safety
 * `grid` must be a live handle, `spec` a NUL-terminated string and `out` a
 * valid handle slot.
 */
enum MfpStatus mfp_weight_from_preset(const struct MfpGrid *grid,
                                      const char *spec,
                                      struct MfpWeight **out);

/**
 * Builds a weight from `len` row-major node values.
 *
 * # Safety
 * `values` must point to `len` doubles; `grid` and `out` as above.
 */
enum MfpStatus mfp_weight_from_values(const struct MfpGrid *grid,
                                      const double *values,
                                      size_t len,
                                      struct MfpWeight **out);

/**
 * # Safety
 * `weight` must come from an `mfp_weight_*` constructor or be null.
 */
void mfp_weight_free(struct MfpWeight *weight);

/**
 * # Safety
 * `values` must point to `len` doubles; `grid` and `out` as above.
 */
enum MfpStatus mfp_field_from_values(const struct MfpGrid *grid,
                                     const double *values,
                                     size_t len,
                                     struct MfpField **out);

/**
 * Number of values in the field; 0 for null.
 *
 * # Safety
 * `field` must be a live handle or null.
 */
size_t mfp_field_len(const struct MfpField *field);

/**
 * Copies the field into `out`, which must hold exactly `mfp_field_len`
 * doubles.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum MfpStatus mfp_field_values(const struct MfpField *field, double *out, size_t len);

/**
 * # Safety
 * `field` must come from an `mfp_field_*` constructor or be null.
 */
void mfp_field_free(struct MfpField *field);

/**
 * First nonzero eigenvalue of the unweighted Laplacian.
 *
 * # Safety
 * `grid` must be a live handle and `out` writable.
 */
enum MfpStatus mfp_first_eigenvalue(const struct MfpGrid *grid, double *out);

/**
 * # Safety
 * Handles must be live and `out` writable.
 */
enum MfpStatus mfp_evaluate(const struct MfpField *field,
                            const struct MfpWeight *weight,
                            double alpha1,
                            double alpha2,
                            struct MfpFunctionalReport *out);

/**
 * # Safety
 * Handles must be live and `out` writable.
 */
enum MfpStatus mfp_residual_norm(const struct MfpField *field,
                                 const struct MfpWeight *weight,
                                 double alpha1,
                                 double alpha2,
                                 double *out);

/**
 * # Safety
 * `grid` must be a live handle and `out` writable.
 */
enum MfpStatus mfp_gate(const struct MfpGrid *grid,
                        double alpha1,
                        double alpha2,
                        struct MfpGateReport *out);

/**
 * Runs the mountain-pass solver. `config` may be null for defaults. A run
 * that ends without convergence still returns `MFP_STATUS_OK` and a result;
 * query it with `mfp_result_status`.
 *
 * # Safety
 * `weight` must be live, `config` null or valid, `out` a valid handle slot.
 */
enum MfpStatus mfp_solve(const struct MfpWeight *weight,
                         double alpha1,
                         double alpha2,
                         const struct MfpSolverConfig *config,
                         struct MfpResult **out);

/**
 * `MFP_STATUS_OK` when converged, otherwise `MFP_STATUS_NO_NEGATIVE_ENDPOINT`
 * or `MFP_STATUS_BUDGET_EXHAUSTED`; `MFP_STATUS_NULL_POINTER` for null.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
enum MfpStatus mfp_result_status(const struct MfpResult *result);

/**
 * Minimax level estimate; NaN for null or when no endpoint was found.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
double mfp_result_level(const struct MfpResult *result);

/**
 * # Safety
 * `result` must be a live handle or null.
 */
double mfp_result_residual(const struct MfpResult *result);

/**
 * # Safety
 * `result` must be a live handle or null.
 */
size_t mfp_result_iterations(const struct MfpResult *result);

/**
 * Copies the solution into a new field handle owned by the caller.
 *
 * # Safety
 * `result` must be live and `out` a valid handle slot.
 */
enum MfpStatus mfp_result_solution(const struct MfpResult *result, struct MfpField **out);

/**
 * # Safety
 * `result` must come from `mfp_solve` or be null.
 */
void mfp_result_free(struct MfpResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MFPASS_H */
