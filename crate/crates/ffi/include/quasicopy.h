#ifndef QUASICOPY_H
#define QUASICOPY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

#define QC_ENGINE_BLOCK 0

#define QC_ENGINE_DENSE 1

#define QC_ENGINE_BOTH 2

/**
 * Status codes returned by every fallible function.
 */
typedef enum QcStatus {
  QC_STATUS_OK = 0,
  QC_STATUS_NULL_POINTER = 1,
  QC_STATUS_INVALID_UTF8 = 2,
  QC_STATUS_INVALID_JSON = 3,
  /**
   * The input parsed but does not describe a valid protocol.
   */
  QC_STATUS_INVALID_INPUT = 4,
  QC_STATUS_DIMENSION_MISMATCH = 5,
  /**
   * The caller's buffer is shorter than the number of values to write.
   */
  QC_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * `P[μ₀] = 0`, so the posterior has no value.
   */
  QC_STATUS_UNDEFINED_POSTERIOR = 7,
  QC_STATUS_PANIC = 8,
  QC_STATUS_INTERNAL = 9,
} QcStatus;

/**
 * Opaque handle to a validated protocol configuration.
 */
typedef struct QcConfig QcConfig;

/**
 * Aggregate results of [`qc_montecarlo`].
 */
typedef struct QcMonteCarloSummary {
  uint64_t trials;
  uint64_t successes;
  /**
   * `successes / trials`.
   */
  double p_mu0_observed;
  /**
   * `cos²φ`.
   */
  double p_mu0_expected;
  /**
   * Smallest fidelity between a recovered state and the input (1 with no successes).
   */
  double min_success_fidelity;
  /**
   * Only populated for `QC_ENGINE_BOTH`.
   */
  uint64_t engine_mismatches;
  double max_engine_state_diff;
} QcMonteCarloSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a JSON config. On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be NULL or a NUL-terminated string; `out` must be NULL or writable.
 */
enum QcStatus qc_config_from_json(const char *json, struct QcConfig **out);

/**
 * Releases a handle from [`qc_config_from_json`]. NULL is ignored.
 *
 * # Safety
 * `cfg` must be NULL or a handle not yet freed.
 */
void qc_config_free(struct QcConfig *cfg);

/**
 * Writes the system dimension `d`.
 *
 * # Safety
 * `cfg` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum QcStatus qc_config_dim(const struct QcConfig *cfg, size_t *out);

/**
 * Writes the number of inner measurement outcomes `n`.
 *
 * # Safety
 * `cfg` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum QcStatus qc_config_outcomes(const struct QcConfig *cfg, size_t *out);

/**
 * `cos²φ`. Total function; never fails.
 */
double qc_reversal_probability(double phi);

/**
 * Writes `P[ν]` for `ν = 1..n` into `out[0..n]`.
 *
 * # Safety
 * `cfg` must be NULL or a live handle; `out` must be NULL or point to `len` writable doubles.
 */
enum QcStatus qc_outcome_probabilities(const struct QcConfig *cfg, double *out, size_t len);

/**
 * Writes `P[ν | μ₀]` into `out[0..n]`. Returns `UndefinedPosterior` when `cos²φ = 0`.
 *
 * # Safety
 * `cfg` must be NULL or a live handle; `out` must be NULL or point to `len` writable doubles.
 */
enum QcStatus qc_posterior_given_success(const struct QcConfig *cfg, double *out, size_t len);

/**
 * Runs trial `index` under `seed` and writes its record as a JSON string.
 *
 * # Safety
 * `cfg` must be NULL or a live handle; `out_json` must be NULL or writable. Release the
 * string with [`qc_string_free`].
 */
enum QcStatus qc_run_trial(const struct QcConfig *cfg,
                           uint64_t seed,
                           uint64_t index,
                           uint32_t engine_code,
                           char **out_json);

/**
 * Compares against the outcome-dependent reversal baseline at each of `phis[0..len]`,
 * writing a JSON array of rows.
 *
 * # Safety
 * `cfg` must be NULL or a live handle; `phis` must point to `len` doubles (or be NULL
 * with `len = 0`); `out_json` must be NULL or writable.
 */
enum QcStatus qc_tradeoff_json(const struct QcConfig *cfg,
                               const double *phis,
                               size_t len,
                               char **out_json);

/**
 * Runs `trials` seeded trials on `threads` workers (0 = all cores).
 *
 * # Safety
 * `cfg` must be NULL or a live handle; `out` must be NULL or writable.
 */
enum QcStatus qc_montecarlo(const struct QcConfig *cfg,
                            uint64_t seed,
                            uint64_t trials,
                            uint32_t engine_code,
                            size_t threads,
                            struct QcMonteCarloSummary *out);

/**
 * Message for the last failed call on this thread, or NULL after a successful call.
 * The pointer stays valid until the next library call on the same thread.
 */
const char *qc_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string from this library not yet freed.
 */
void qc_string_free(char *s);

/**
 * Static name of a status code, e.g. `"QC_STATUS_BUFFER_TOO_SMALL"`, or
 * `"QC_STATUS_UNKNOWN"` for values outside the enum.
 */
const char *qc_status_name(int32_t code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUASICOPY_H */
