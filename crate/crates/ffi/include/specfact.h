#ifndef SPECFACT_H
#define SPECFACT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SPECFACT_DOMAIN_DISC 0

#define SPECFACT_DOMAIN_LINE 1

typedef enum {
  SPECFACT_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  SPECFACT_STATUS_NULL_POINTER = 1,
  /**
   * An argument is out of range or malformed, or an output buffer is too small.
   */
  SPECFACT_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The input violates the factorization hypotheses (not self-adjoint,
   * not positive on the boundary, singular).
   */
  SPECFACT_STATUS_INPUT_ERROR = 3,
  /**
   * The pipeline broke down numerically.
   */
  SPECFACT_STATUS_NUMERICAL_FAILURE = 4,
  /**
   * The factor does not pass verification.
   */
  SPECFACT_STATUS_VERIFICATION_FAILED = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  SPECFACT_STATUS_PANIC = 6,
} SpecfactStatus;

/**
 * A computed spectral factor and its certificate.
 */
typedef struct SpecfactFactor SpecfactFactor;

/**
 * A matrix Laurent polynomial together with its domain.
 */
typedef struct SpecfactPoly SpecfactPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The
 * pointer stays valid until the next library call on the same thread.
 */
const char *specfact_last_error(void);

/**
 * Builds a polynomial from `n_powers` coefficient blocks starting at
 * power `lo`. `re` and `im` each hold `n_powers * m * m` values; `im` may
 * be null for real coefficients.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `n_powers * m * m` doubles;
 * `out` must be a valid pointer.
 */
SpecfactStatus specfact_poly_new(size_t m,
                                 int32_t lo,
                                 size_t n_powers,
                                 uint32_t domain,
                                 const double *re,
                                 const double *im,
                                 SpecfactPoly **out);

/**
 * Parses an instance file in the JSON format used by the command-line tool.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be a valid pointer.
 */
SpecfactStatus specfact_poly_from_json(const char *json, SpecfactPoly **out);

/**
 * Serializes to canonical JSON. Release the string with
 * [`specfact_string_free`].
 *
 * # Safety
 * `p` must be a live handle; `out` must be a valid pointer.
 */
SpecfactStatus specfact_poly_to_json(const SpecfactPoly *p, char **out);

/**
 * Dimension, lowest power, number of stored powers and domain. Any output
 * pointer may be null. A zero polynomial has no stored powers.
 *
 * # Safety
 * `p` must be a live handle; non-null outputs must be valid pointers.
 */
SpecfactStatus specfact_poly_shape(const SpecfactPoly *p,
                                   size_t *m,
                                   int32_t *lo,
                                   size_t *n_powers,
                                   uint32_t *domain);

/**
 * Copies the coefficients into `re` and `im`, laid out as for
 * [`specfact_poly_new`]. `len` is the capacity of each buffer.
 *
 * # Safety
 * `p` must be a live handle; `re` and `im` must each hold `len` doubles.
 */
SpecfactStatus specfact_poly_coeffs(const SpecfactPoly *p, double *re, double *im, size_t len);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void specfact_poly_free(SpecfactPoly *p);

/**
 * Factors `s`. `canonical` selects the canonical representative; `grid`
 * is the boundary grid size (0 for the default).
 *
 * # Safety
 * `s` must be a live handle; `out` must be a valid pointer.
 */
SpecfactStatus specfact_factorize(const SpecfactPoly *s,
                                  bool canonical,
                                  size_t grid,
                                  SpecfactFactor **out);

/**
 * A new polynomial handle holding the factor `S⁺`.
 *
 * # Safety
 * `f` must be a live handle; `out` must be a valid pointer.
 */
SpecfactStatus specfact_factor_poly(const SpecfactFactor *f, SpecfactPoly **out);

/**
 * Certificate summary: reconstruction residual, number of sweep steps and
 * the boundary-degenerate flag. Any output pointer may be null.
 *
 * # Safety
 * `f` must be a live handle; non-null outputs must be valid pointers.
 */
SpecfactStatus specfact_factor_certificate(const SpecfactFactor *f,
                                           double *recon_residual,
                                           size_t *sweep_steps,
                                           bool *boundary_degenerate);

/**
 * # Safety
 * `f` must be null or a handle not yet freed.
 */
void specfact_factor_free(SpecfactFactor *f);

/**
 * Verifies `p` as a factor of `s` with reconstruction threshold `tol`
 * (0 for the default). Returns [`SpecfactStatus::VerificationFailed`]
 * when the checks fail; `recon_residual` may be null.
 *
 * # Safety
 * `s` and `p` must be live handles; `recon_residual` must be null or valid.
 */
SpecfactStatus specfact_verify(const SpecfactPoly *s,
                               const SpecfactPoly *p,
                               double tol,
                               size_t grid,
                               double *recon_residual);

/**
 * Writes a random instance and its canonical factor.
 *
 * # Safety
 * `spectrum` and `reference` must be valid pointers.
 */
SpecfactStatus specfact_generate(size_t m,
                                 size_t degree,
                                 uint64_t seed,
                                 uint32_t domain,
                                 bool boundary_zero,
                                 SpecfactPoly **spectrum,
                                 SpecfactPoly **reference);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void specfact_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECFACT_H */
