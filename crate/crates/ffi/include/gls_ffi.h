#ifndef GLS_FFI_H
#define GLS_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call.
 */
typedef enum GlsStatus {
  GLS_STATUS_OK = 0,
  GLS_STATUS_DOMAIN = 1,
  GLS_STATUS_NOT_MONOTONE = 2,
  GLS_STATUS_OUT_OF_RANGE = 3,
  GLS_STATUS_TRUNCATION_UNCERTAIN = 4,
  GLS_STATUS_TAIL_UNCERTAIN = 5,
  GLS_STATUS_NOT_INCREASING = 6,
  GLS_STATUS_NON_YOUNG = 7,
  GLS_STATUS_NON_CONVEX = 8,
  GLS_STATUS_ALL_NON_CONVEX = 9,
  GLS_STATUS_NOT_VANISHING_AT_ZERO = 10,
  GLS_STATUS_BRACKET_FAILURE = 11,
  GLS_STATUS_EXTENSION_NOT_CONVEX = 12,
  GLS_STATUS_NO_VALID_C5 = 13,
  GLS_STATUS_INVALID_INPUT = 14,
  GLS_STATUS_IO = 15,
  GLS_STATUS_CSV = 16,
  GLS_STATUS_NULL_POINTER = 17,
  GLS_STATUS_PANIC = 18,
} GlsStatus;

/**
 * The forward pipeline built from a generating function.
 */
typedef struct GlsForward GlsForward;

/**
 * A fundamental function given by a table.
 */
typedef struct GlsPhi GlsPhi;

/**
 * A generating function.
 */
typedef struct GlsPsi GlsPsi;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *gls_last_error_message(void);

/**
 * Parses a generating function spec such as `power:m=2`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GlsStatus gls_psi_parse(const char *spec, struct GlsPsi **out);

/**
 * # Safety
 * `psi` must come from [`gls_psi_parse`] and not be used afterwards.
 */
void gls_psi_free(struct GlsPsi *psi);

/**
 * `psi(p)`.
 *
 * # Safety
 * `psi` must be a live handle and `out` a valid pointer.
 */
enum GlsStatus gls_psi_eval(const struct GlsPsi *psi, double p, double *out);

/**
 * `sup_p delta^(1/p) / psi(p)`.
 *
 * # Safety
 * `psi` must be a live handle and `out` a valid pointer.
 */
enum GlsStatus gls_fundamental_direct(const struct GlsPsi *psi, double delta, double *out);

/**
 * Builds `nu`, `N` and `theta` for `psi`.
 *
 * # Safety
 * `psi` must be a live handle and `out` a valid pointer.
 */
enum GlsStatus gls_forward_new(const struct GlsPsi *psi, struct GlsForward **out);

/**
 * # Safety
 * `fw` must come from [`gls_forward_new`] and not be used afterwards.
 */
void gls_forward_free(struct GlsForward *fw);

/**
 * `N(u)`.
 *
 * # Safety
 * `fw` must be a live handle and `out` a valid pointer.
 */
enum GlsStatus gls_forward_orlicz(const struct GlsForward *fw, double u, double *out);

/**
 * `theta(delta) = 1 / N^(-1)(1 / delta)`.
 *
 * # Safety
 * `fw` must be a live handle and `out` a valid pointer.
 */
enum GlsStatus gls_forward_theta(const struct GlsForward *fw, double delta, double *out);

/**
 * `nu*(0)`; `exp` of it is the constant of the exact inverse.
 *
 * # Safety
 * `fw` must be a live handle and `out` a valid pointer.
 */
enum GlsStatus gls_forward_nu_star_zero(const struct GlsForward *fw, double *out);

/**
 * Fundamental function from `n` knots `(deltas[i], values[i])`,
 * interpolated log-log.
 *
 * # Safety
 * `deltas` and `values` must point to `n` doubles; `out` must be valid.
 */
enum GlsStatus gls_phi_from_table(const double *deltas,
                                  const double *values,
                                  size_t n,
                                  struct GlsPhi **out);

/**
 * # Safety
 * `phi` must come from [`gls_phi_from_table`] and not be used afterwards.
 */
void gls_phi_free(struct GlsPhi *phi);

/**
 * `N(z) = 1 / phi^(-1)(1 / z)`.
 *
 * # Safety
 * `phi` must be a live handle and `out` a valid pointer.
 */
enum GlsStatus gls_orlicz_from_fundamental(const struct GlsPhi *phi, double z, double *out);

/**
 * The constant `C` that makes `ln(C + N)` most convex.
 *
 * # Safety
 * `phi` must be a live handle and `out` a valid pointer.
 */
enum GlsStatus gls_choose_c(const struct GlsPhi *phi, double *out);

/**
 * Recovered `psi` on `n` increasing points `p_grid`, written to `out`.
 *
 * # Safety
 * `p_grid` and `out` must point to `n` doubles.
 */
enum GlsStatus gls_psi_from_fundamental(const struct GlsPhi *phi,
                                        double c,
                                        const double *p_grid,
                                        size_t n,
                                        double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GLS_FFI_H */
