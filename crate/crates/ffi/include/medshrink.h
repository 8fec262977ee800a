#ifndef MEDSHRINK_H
#define MEDSHRINK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MedshrinkStatus {
  MEDSHRINK_STATUS_OK = 0,
  MEDSHRINK_STATUS_NULL_POINTER = 1,
  MEDSHRINK_STATUS_INVALID_INPUT = 2,
  MEDSHRINK_STATUS_UNKNOWN_FILTER = 3,
  MEDSHRINK_STATUS_DEGENERATE_NOISE = 4,
  MEDSHRINK_STATUS_BUFFER_TOO_SMALL = 5,
  MEDSHRINK_STATUS_PANIC = 6,
} MedshrinkStatus;

// Opaque fitted estimate.
typedef struct MedshrinkFit MedshrinkFit;

// Estimator options. Zero means "use the default" for `j0_plus_one`,
// `block_cardinality` and `h_inv_sq`.
typedef struct MedshrinkOptions {
  // NUL-terminated filter name (`haar`, `db2`, `db4`), or NULL for db4.
  const char *wavelet;
  uint32_t j0_plus_one;
  uintptr_t block_cardinality;
  // Known `h(0)^-2`; the value is estimated from the data when zero.
  double h_inv_sq;
  bool paired_mean_noise;
  bool shrink;
  bool bias_correction;
  // Report a degenerate noise estimate as an error.
  bool strict;
} MedshrinkOptions;

// Grid sizes chosen for a sample.
typedef struct MedshrinkGridPlan {
  uint32_t levels;
  uintptr_t bins_per_axis;
  uintptr_t bin_count;
  uintptr_t kappa;
} MedshrinkGridPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Options matching the library defaults.
struct MedshrinkOptions medshrink_default_options(void);

// Fits the estimator to `n` observations.
//
// `u` holds `n * q` coordinates in row-major order and `y` holds `n`
// responses. `options` may be NULL for the defaults. On success `*out`
// receives a handle that must be released with [`medshrink_fit_free`].
//
// # Safety
// `u` and `y` must point to readable arrays of the stated lengths, `options`
// must be NULL or valid, and `out` must be writable.
enum MedshrinkStatus medshrink_fit(const double *u,
                                   const double *y,
                                   uintptr_t n,
                                   uintptr_t q,
                                   const struct MedshrinkOptions *options,
                                   struct MedshrinkFit **out);

// Releases a fit. NULL is ignored.
//
// # Safety
// `fit` must be NULL or a handle from [`medshrink_fit`] not yet freed.
void medshrink_fit_free(struct MedshrinkFit *fit);

// Number of bins in the estimate (`T^q`), or 0 for NULL.
//
// # Safety
// `fit` must be NULL or a live handle.
uintptr_t medshrink_fit_len(const struct MedshrinkFit *fit);

// Bins per axis (`T`), or 0 for NULL.
//
// # Safety
// `fit` must be NULL or a live handle.
uintptr_t medshrink_fit_side(const struct MedshrinkFit *fit);

// Copies the estimate at the bin points into `buf`, first axis slowest.
//
// # Safety
// `fit` must be a live handle and `buf` must have room for `cap` doubles.
enum MedshrinkStatus medshrink_fit_values(const struct MedshrinkFit *fit,
                                          double *buf,
                                          uintptr_t cap);

// Estimated median bias that was subtracted from the fit. NaN for NULL.
//
// # Safety
// `fit` must be NULL or a live handle.
double medshrink_fit_bias(const struct MedshrinkFit *fit);

// `h(0)^-2` used for shrinkage. NaN for NULL.
//
// # Safety
// `fit` must be NULL or a live handle.
double medshrink_fit_h_inv_sq(const struct MedshrinkFit *fit);

// Whether the noise estimate fell below the floor and was clamped.
//
// # Safety
// `fit` must be NULL or a live handle.
bool medshrink_fit_noise_degenerate(const struct MedshrinkFit *fit);

// Threshold constant of the block James-Stein rule.
double medshrink_lambda_star(void);

// Grid sizes the estimator would use for `n` points in dimension `q`.
//
// # Safety
// `out` must be writable.
enum MedshrinkStatus medshrink_plan_grid(uintptr_t n, uintptr_t q, struct MedshrinkGridPlan *out);

// Message for the last failure on this thread, or NULL if none.
//
// The pointer stays valid until the next failing call on the same thread.
const char *medshrink_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MEDSHRINK_H */
