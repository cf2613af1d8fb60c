/* C interface for the holoconvex numerical convexity checker. */

#ifndef HOLOCONVEX_H
#define HOLOCONVEX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every C entry point.
 */
typedef enum HxStatus {
  HX_STATUS_OK = 0,
  HX_STATUS_NULL_POINTER = 1,
  HX_STATUS_INVALID_ARGUMENT = 2,
  HX_STATUS_INVALID_CONFIG = 3,
  HX_STATUS_DIMENSION_MISMATCH = 4,
  HX_STATUS_SINGULAR_MATRIX = 5,
  HX_STATUS_NON_FINITE_INPUT = 6,
  HX_STATUS_ZERO_POINT = 7,
  HX_STATUS_DEGENERATE_CONSTRAINT = 8,
  HX_STATUS_SINGULAR_JACOBIAN = 9,
  HX_STATUS_STEP_TOO_LARGE = 10,
  HX_STATUS_SHAPE_MISMATCH = 11,
  HX_STATUS_PARAM_OUT_OF_RANGE = 12,
  HX_STATUS_ALL_SAMPLES_SINGULAR = 13,
  HX_STATUS_UNSUPPORTED_EXPONENT = 14,
  HX_STATUS_INTERNAL_ERROR = 15,
} HxStatus;

/**
 * Opaque domain handle.
 */
typedef struct HxDomain HxDomain;

/**
 * Opaque mapping handle.
 */
typedef struct HxMapping HxMapping;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *hx_status_message(enum HxStatus status);

/**
 * Library version as a static string.
 */
const char *hx_version(void);

/**
 * Creates a domain from `n` exponents (each > 1).
 *
 * # Safety
 * `p` must point to `n` readable doubles; `out` must be a valid location for
 * one pointer. The handle must be released with `hx_domain_free`.
 */
enum HxStatus hx_domain_new(const double *p, uintptr_t n, struct HxDomain **out);

/**
 * # Safety
 * `domain` must come from `hx_domain_new` and not have been freed.
 */
void hx_domain_free(struct HxDomain *domain);

/**
 * Parses a mapping from the same JSON object the CLI configuration uses
 * (`{"family": "...", ...}`) and instantiates it at dimension `n`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` must be a valid
 * location for one pointer. The handle must be released with
 * `hx_mapping_free`.
 */
enum HxStatus hx_mapping_from_json(const char *json, uintptr_t n, struct HxMapping **out);

/**
 * # Safety
 * `mapping` must come from `hx_mapping_from_json` and not have been freed.
 */
void hx_mapping_free(struct HxMapping *mapping);

/**
 * Minkowski functional at the interleaved point `z` (length `2 * n`).
 *
 * # Safety
 * Pointer arguments must be valid for the documented lengths.
 */
enum HxStatus hx_minkowski(const struct HxDomain *domain,
                           const double *z,
                           uintptr_t n,
                           double *out_rho,
                           double *out_residual);

/**
 * Conjugate-coordinate gradient of the Minkowski functional; `out` receives
 * `2 * n` interleaved doubles.
 *
 * # Safety
 * Pointer arguments must be valid for the documented lengths.
 */
enum HxStatus hx_rho_gradient(const struct HxDomain *domain,
                              const double *z,
                              uintptr_t n,
                              double *out);

/**
 * Evaluates `J_f(z, b)`; also reports the tangency functional at `b`.
 *
 * # Safety
 * Pointer arguments must be valid for the documented lengths.
 */
enum HxStatus hx_evaluate_j(const struct HxDomain *domain,
                            const struct HxMapping *mapping,
                            const double *z,
                            const double *b,
                            uintptr_t n,
                            double *out_j,
                            double *out_residual);

/**
 * Monte-Carlo scan; on success `*out_json` receives the report document.
 *
 * # Safety
 * Handles must be live; `out_json` must be a valid location for one pointer.
 * Free the returned string with `hx_string_free`.
 */
enum HxStatus hx_scan_json(const struct HxDomain *domain,
                           const struct HxMapping *mapping,
                           uintptr_t samples,
                           uint64_t seed,
                           double rho_floor,
                           double tol,
                           uintptr_t threads,
                           char **out_json);

/**
 * Checks condition system 1-4. `coupling` selects the coupled coordinate for
 * system 3 (1-based; pass 0 for the default, the last coordinate).
 *
 * # Safety
 * As for `hx_scan_json`.
 */
enum HxStatus hx_check_json(const struct HxDomain *domain,
                            const struct HxMapping *mapping,
                            uint32_t theorem,
                            uintptr_t coupling,
                            uintptr_t samples,
                            uint64_t seed,
                            uintptr_t threads,
                            char **out_json);

/**
 * Validates the coefficient bounds of example family 1-4.
 *
 * # Safety
 * As for `hx_scan_json`.
 */
enum HxStatus hx_validate_example_json(const struct HxDomain *domain,
                                       const struct HxMapping *mapping,
                                       uint32_t which,
                                       char **out_json);

/**
 * Multi-start search for criterion violations.
 *
 * # Safety
 * As for `hx_scan_json`.
 */
enum HxStatus hx_falsify_json(const struct HxDomain *domain,
                              const struct HxMapping *mapping,
                              uintptr_t restarts,
                              uintptr_t iterations,
                              uint64_t seed,
                              double rho_floor,
                              double rho_ceiling,
                              double tol,
                              uintptr_t threads,
                              char **out_json);

/**
 * Scan plus warm-started search with a shared budget (>= 1000).
 *
 * # Safety
 * As for `hx_scan_json`.
 */
enum HxStatus hx_certify_json(const struct HxDomain *domain,
                              const struct HxMapping *mapping,
                              uintptr_t budget,
                              uint64_t seed,
                              double rho_floor,
                              double tol,
                              uintptr_t threads,
                              char **out_json);

/**
 * Releases a string returned by a `_json` entry point.
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void hx_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOLOCONVEX_H */
