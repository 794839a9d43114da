#ifndef VTYPE_CAVITY_H
#define VTYPE_CAVITY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of entries in an exported 9x9 density matrix.
 */
#define VC_DENSITY_LEN 81

typedef enum VcNormalization {
  VC_NORMALIZATION_UNNORMALIZED = 0,
  VC_NORMALIZATION_IMMEDIATE = 1,
} VcNormalization;

typedef enum VcStatus {
  VC_STATUS_OK = 0,
  VC_STATUS_NULL_POINTER = 1,
  VC_STATUS_INVALID_PARAMETER = 2,
  VC_STATUS_INVALID_UTF8 = 3,
  VC_STATUS_CONFIG = 4,
  VC_STATUS_NUMERICAL = 5,
  VC_STATUS_BUFFER_TOO_SMALL = 6,
  VC_STATUS_IO = 7,
  VC_STATUS_PANIC = 8,
} VcStatus;

/**
 * Opaque simulation handle.
 */
typedef struct VcSimulation VcSimulation;

/**
 * Inputs for one simulation. Rates are in the same units as `gamma0`.
 *
 * The initial state is `c2a |C1 A2> + c1b |B1 C2>`.
 */
typedef struct VcParams {
  double gamma0;
  double kappa;
  double theta;
  double delta;
  double p;
  double p_r;
  double c2a_re;
  double c2a_im;
  double c1b_re;
  double c1b_im;
  enum VcNormalization normalization;
} VcParams;

/**
 * Scalar outputs at one time. Populations use the 1-based labels of the
 * nine-state basis `|CC>, |CB>, |CA>, |BC>, ..., |AA>`.
 */
typedef struct VcObservation {
  double t;
  double negativity;
  double success_prob;
  double rho11;
  double rho33;
  double rho44;
  double rho77;
  double coherence34_abs;
} VcObservation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parameters for a Bell initial state with no measurement.
 */
struct VcParams vc_params_default(void);

/**
 * Creates a simulation. On success `*out` owns a new handle.
 *
 * # Safety
 * `params` must point to a valid `VcParams`; `out` must be writable.
 */
enum VcStatus vc_simulation_new(const struct VcParams *params, struct VcSimulation **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `sim` must be null or a handle from [`vc_simulation_new`] not yet freed.
 */
void vc_simulation_free(struct VcSimulation *sim);

/**
 * Evaluates the pipeline at time `t`.
 *
 * # Safety
 * `sim` must be a live handle; `out` must be writable.
 */
enum VcStatus vc_simulation_observe(const struct VcSimulation *sim,
                                    double t,
                                    struct VcObservation *out);

/**
 * Writes the normalized post-reversal density matrix at `t`, row-major,
 * into `re` and `im`, each of length `len >= VC_DENSITY_LEN`.
 *
 * # Safety
 * `sim` must be a live handle; `re` and `im` must each hold `len` doubles.
 */
enum VcStatus vc_simulation_density(const struct VcSimulation *sim,
                                    double t,
                                    double *re,
                                    double *im,
                                    size_t len);

/**
 * Runs a built-in preset and returns its CSV in `*csv_out`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `csv_out` must be writable.
 */
enum VcStatus vc_run_preset(const char *name, enum VcNormalization normalization, char **csv_out);

/**
 * Runs a scenario given as config text and returns its CSV in `*csv_out`.
 * The normalization argument overrides any value implied by the text.
 *
 * # Safety
 * `config` must be a NUL-terminated string; `csv_out` must be writable.
 */
enum VcStatus vc_run_config(const char *config, enum VcNormalization normalization, char **csv_out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void vc_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *vc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *vc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VTYPE_CAVITY_H */
