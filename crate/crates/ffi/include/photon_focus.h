#ifndef PHOTON_FOCUS_H
#define PHOTON_FOCUS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Correlation route selector.
 */
typedef enum {
  /**
   * Closed form for sweeps; quantum paths for single evaluations.
   */
  PF_ROUTE_AUTO = 0,
  PF_ROUTE_PATHS = 1,
  PF_ROUTE_OPERATOR = 2,
  PF_ROUTE_CLOSED_FORM = 3,
} PfRoute;

/**
 * Result codes shared by all functions.
 */
typedef enum {
  PF_STATUS_OK = 0,
  PF_STATUS_INVALID_INPUT = 1,
  PF_STATUS_DEGENERATE_STATE = 2,
  PF_STATUS_ESTIMATION = 3,
  PF_STATUS_NULL_POINTER = 4,
  PF_STATUS_BUFFER_TOO_SMALL = 5,
  PF_STATUS_PANIC = 6,
} PfStatus;

/**
 * Opaque emitter chain.
 */
typedef struct PfChain PfChain;

/**
 * Opaque register state.
 */
typedef struct PfState PfState;

/**
 * Opaque sweep result.
 */
typedef struct PfSweep PfSweep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *pf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pf_version(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
PfStatus pf_chain_new(size_t n_emitters, double kd, PfChain **out);

/**
 * # Safety
 * `chain` must be NULL or a pointer returned by [`pf_chain_new`], not yet freed.
 */
void pf_chain_free(PfChain *chain);

/**
 * # Safety
 * `chain` must be a live chain handle and `out` writable.
 */
PfStatus pf_chain_n_emitters(const PfChain *chain, size_t *out);

/**
 * Optical phase `-l kd sin(theta)` of emitter `l` (1-based).
 *
 * # Safety
 * `out` must be writable.
 */
PfStatus pf_phase(size_t l, double theta, double kd, double *out);

/**
 * Permanent of an `m x m` complex matrix given row-major as interleaved
 * `(re, im)` pairs, `2 m^2` doubles in total.
 *
 * # Safety
 * `entries` must point to `2 * m * m` readable doubles; outputs writable.
 */
PfStatus pf_permanent(const double *entries, size_t m, double *out_re, double *out_im);

/**
 * `G^(m)` for `m` detectors at `angles`. `PF_ROUTE_CLOSED_FORM` requires
 * the first `m - 1` angles to be equal.
 *
 * # Safety
 * `chain` must be a live handle, `angles` must point to `m` doubles and
 * `out` must be writable.
 */
PfStatus pf_g_m(const PfChain *chain, const double *angles, size_t m, PfRoute route, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
PfStatus pf_g_m_closed_form(size_t n,
                            size_t m,
                            double theta1,
                            double theta2,
                            double kd,
                            double *out);

/**
 * # Safety
 * `out` must be writable.
 */
PfStatus pf_visibility_closed_form(size_t n, size_t m, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
PfStatus pf_fwhm_predicted(size_t n, double kd, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
PfStatus pf_state_fully_excited(size_t n, PfState **out);

/**
 * # Safety
 * `out` must be writable.
 */
PfStatus pf_state_w(size_t n, PfState **out);

/**
 * Normalized register state after detections at `angles[0..k]`.
 *
 * # Safety
 * `chain` must be a live handle, `angles` must point to `k` doubles (may be
 * NULL when `k == 0`) and `out` must be writable.
 */
PfStatus pf_state_conditional(const PfChain *chain, const double *angles, size_t k, PfState **out);

/**
 * Unnormalized result of one far-field operator application.
 *
 * # Safety
 * `state` and `chain` must be live handles and `out` writable.
 */
PfStatus pf_state_apply_field(const PfState *state,
                              double theta,
                              const PfChain *chain,
                              PfState **out);

/**
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
PfStatus pf_state_norm_sq(const PfState *state, double *out);

/**
 * `<a|b>`.
 *
 * # Safety
 * `a` and `b` must be live handles; outputs writable.
 */
PfStatus pf_state_overlap(const PfState *a, const PfState *b, double *out_re, double *out_im);

/**
 * Number of stored basis terms.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
PfStatus pf_state_len(const PfState *state, size_t *out);

/**
 * Basis term `index` (in ascending mask order). Bit `l - 1` of the mask is
 * set when atom `l` is in the ground level.
 *
 * # Safety
 * `state` must be a live handle; outputs writable.
 */
PfStatus pf_state_entry(const PfState *state,
                        size_t index,
                        uint64_t *out_ground_mask,
                        double *out_re,
                        double *out_im);

/**
 * # Safety
 * `state` must be NULL or a live state handle, not yet freed.
 */
void pf_state_free(PfState *state);

/**
 * Mean intensity at `theta2` emitted by a normalized state.
 *
 * # Safety
 * `state` and `chain` must be live handles and `out` writable.
 */
PfStatus pf_g1_conditional(const PfState *state, double theta2, const PfChain *chain, double *out);

/**
 * Sweeps `theta2` over `points` uniform angles in `[-pi/2, pi/2]` with
 * `m - 1` detectors fixed at `theta1`.
 *
 * # Safety
 * `chain` must be a live handle and `out` writable.
 */
PfStatus pf_sweep(const PfChain *chain,
                  size_t m,
                  double theta1,
                  size_t points,
                  PfRoute route,
                  PfSweep **out);

/**
 * # Safety
 * `sweep` must be a live handle and `out` writable.
 */
PfStatus pf_sweep_len(const PfSweep *sweep, size_t *out);

/**
 * Route actually used by the sweep.
 *
 * # Safety
 * `sweep` must be a live handle and `out` writable.
 */
PfStatus pf_sweep_route(const PfSweep *sweep, PfRoute *out);

/**
 * Copies the sweep into caller buffers of capacity `capacity`. Any of the
 * three buffers may be NULL to skip it.
 *
 * # Safety
 * Non-NULL buffers must each hold `capacity` writable doubles.
 */
PfStatus pf_sweep_copy(const PfSweep *sweep,
                       double *angles,
                       double *values,
                       double *normalized,
                       size_t capacity);

/**
 * # Safety
 * `sweep` must be a live handle and `out` writable.
 */
PfStatus pf_sweep_fwhm(const PfSweep *sweep, double *out);

/**
 * # Safety
 * `sweep` must be a live handle and `out` writable.
 */
PfStatus pf_sweep_visibility(const PfSweep *sweep, double *out);

/**
 * # Safety
 * `sweep` must be NULL or a live sweep handle, not yet freed.
 */
void pf_sweep_free(PfSweep *sweep);

/**
 * Seeded cross-check of all correlation routes.
 *
 * # Safety
 * Outputs must be writable.
 */
PfStatus pf_verify_routes(size_t n_max,
                          size_t trials,
                          uint64_t seed,
                          bool *out_passed,
                          double *out_max_discrepancy);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHOTON_FOCUS_H */
