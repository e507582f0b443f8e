#ifndef LOWRES_H
#define LOWRES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LowresStatus {
  LOWRES_STATUS_OK = 0,
  LOWRES_STATUS_NULL_POINTER = 1,
  LOWRES_STATUS_CONFIG = 2,
  LOWRES_STATUS_DOMAIN = 3,
  LOWRES_STATUS_INVARIANT = 4,
  LOWRES_STATUS_IO = 5,
  LOWRES_STATUS_BUFFER_TOO_SMALL = 6,
  LOWRES_STATUS_PANIC = 7,
} LowresStatus;

/**
 * Two-mode Fock-space state at a fixed time.
 */
typedef struct LowresFockState LowresFockState;

/**
 * Model parameters together with the initial phase-space point.
 */
typedef struct LowresParams LowresParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *lowres_last_error_message(void);

/**
 * Static NUL-terminated version string.
 */
const char *lowres_version(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum LowresStatus lowres_params_new(double omega1,
                                    double omega2,
                                    double g1,
                                    double g2,
                                    double g,
                                    double hbar,
                                    double mass,
                                    double q10,
                                    double p10,
                                    double q20,
                                    double p20,
                                    struct LowresParams **out);

/**
 * # Safety
 * `p` must be null or a handle from `lowres_params_new` not yet freed.
 */
void lowres_params_free(struct LowresParams *p);

/**
 * Closed-form `(q, p)` of mode `mode` (1 or 2) at time `t`.
 * `corrected != 0` selects the oracle-consistent phase, otherwise the printed one.
 *
 * # Safety
 * `p` must be a live handle; `out` must point to two writable doubles.
 */
enum LowresStatus lowres_closed_form_expectation(const struct LowresParams *p,
                                                 double t,
                                                 uint32_t mode,
                                                 int32_t corrected,
                                                 double *out);

/**
 * Series linear entropy of mode 1 at time `t`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum LowresStatus lowres_linear_entropy(const struct LowresParams *p,
                                        double t,
                                        double eps_tail,
                                        double *out);

/**
 * Fock-space state evolved to time `t`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum LowresStatus lowres_fock_evolve(const struct LowresParams *p,
                                     double t,
                                     double eps_tail,
                                     struct LowresFockState **out);

/**
 * # Safety
 * `s` must be null or a handle from `lowres_fock_evolve` not yet freed.
 */
void lowres_fock_free(struct LowresFockState *s);

/**
 * Truncation sizes per mode.
 *
 * # Safety
 * `s` must be a live handle; `n1`, `n2` must be writable.
 */
enum LowresStatus lowres_fock_dims(const struct LowresFockState *s, size_t *n1, size_t *n2);

/**
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum LowresStatus lowres_fock_norm(const struct LowresFockState *s, double *out);

/**
 * `(q1, p1, q2, p2)` expectations from the state.
 *
 * # Safety
 * Handles must be live; `out` must point to four writable doubles.
 */
enum LowresStatus lowres_fock_observables(const struct LowresFockState *s,
                                          const struct LowresParams *p,
                                          double *out);

/**
 * Linear entropy `1 − Tr ρ²` of the reduced state of mode `mode` (1 or 2).
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum LowresStatus lowres_fock_linear_entropy(const struct LowresFockState *s,
                                             uint32_t mode,
                                             double *out);

/**
 * Cat-state coefficients at the revival fraction `r/s`.
 * `len` always receives the component count; when it exceeds `capacity`
 * nothing is written and `BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `re` and `im` must hold `capacity` doubles; `len` must be writable.
 */
enum LowresStatus lowres_cat_coefficients(uint64_t r,
                                          uint64_t s,
                                          double *re,
                                          double *im,
                                          size_t capacity,
                                          size_t *len);

/**
 * `|Σ δx ψ*_k ψ_{k+1}|` for amplitudes sampled at spacing `dx`.
 *
 * # Safety
 * `re` and `im` must each hold `len` doubles; `out` must be writable.
 */
enum LowresStatus lowres_commutator_indicator(const double *re,
                                              const double *im,
                                              size_t len,
                                              double dx,
                                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOWRES_H */
