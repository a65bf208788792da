#ifndef HAAR_FLUCT_H
#define HAAR_FLUCT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HfStatus {
  HF_STATUS_OK = 0,
  HF_STATUS_NULL_POINTER = 1,
  HF_STATUS_INVALID_UTF8 = 2,
  HF_STATUS_SYNTAX = 3,
  HF_STATUS_INVALID_ARGUMENT = 4,
  HF_STATUS_INVALID_MODEL = 5,
  HF_STATUS_NUMERICAL = 6,
  HF_STATUS_MULTIPLICITY = 7,
  HF_STATUS_UNSUPPORTED = 8,
  HF_STATUS_BUFFER_TOO_SMALL = 9,
  HF_STATUS_PANIC = 10,
} HfStatus;

typedef enum HfModelKind {
  HF_MODEL_KIND_GENERAL_TWO_VAR = 0,
  HF_MODEL_KIND_CONJUGATION = 1,
  HF_MODEL_KIND_SUM_CONJUGATION = 2,
  HF_MODEL_KIND_ROTATION = 3,
} HfModelKind;

typedef enum HfSide {
  HF_SIDE_A = 0,
  HF_SIDE_B = 1,
} HfSide;

/**
 * Validated model specification.
 */
typedef struct HfModel HfModel;

/**
 * Parsed noncommutative polynomial.
 */
typedef struct HfPolynomial HfPolynomial;

typedef struct HfComplex {
  double re;
  double im;
} HfComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *hf_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void hf_string_free(char *s);

/**
 * # Safety
 * `text` must be a nul-terminated string and `out` writable.
 */
enum HfStatus hf_polynomial_parse(const char *text, struct HfPolynomial **out);

/**
 * # Safety
 * `p` must be null or a handle from [`hf_polynomial_parse`], not yet freed.
 */
void hf_polynomial_free(struct HfPolynomial *p);

/**
 * Canonical text; release with [`hf_string_free`].
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum HfStatus hf_polynomial_to_string(const struct HfPolynomial *p, char **out);

/**
 * Evaluates with commuting scalars `x`, `y`.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum HfStatus hf_polynomial_eval(const struct HfPolynomial *p,
                                 struct HfComplex x,
                                 struct HfComplex y,
                                 struct HfComplex *out);

/**
 * Builds a model. `poly` may be null for the sum and rotation models; it is copied.
 *
 * # Safety
 * Array arguments must hold the stated number of elements; `out` must be writable.
 */
enum HfStatus hf_model_new(enum HfModelKind kind,
                           const struct HfPolynomial *poly,
                           const struct HfComplex *alphas,
                           size_t r,
                           const struct HfComplex *betas,
                           size_t s,
                           size_t n,
                           struct HfModel **out);

/**
 * # Safety
 * `m` must be null or a handle from [`hf_model_new`], not yet freed.
 */
void hf_model_free(struct HfModel *m);

/**
 * Number of nontrivial eigenvalues, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t hf_model_reduced_dim(const struct HfModel *m);

/**
 * Limiting nontrivial eigenvalues in slot order.
 *
 * # Safety
 * `m` must be a live handle, `out` must hold `cap` elements, `len` must be writable.
 */
enum HfStatus hf_model_limits(const struct HfModel *m,
                              struct HfComplex *out,
                              size_t cap,
                              size_t *len);

/**
 * Nontrivial eigenvalues of one Haar draw, matched to the limit slots. The draw is
 * sample `stream` of master seed `seed`, so results do not depend on call order.
 *
 * # Safety
 * As for [`hf_model_limits`].
 */
enum HfStatus hf_model_sample_eigenvalues(const struct HfModel *m,
                                          uint64_t seed,
                                          uint64_t stream,
                                          struct HfComplex *out,
                                          size_t cap,
                                          size_t *len);

/**
 * Mixture coefficients of the fluctuation law at the limit on `side`, index `index`
 * (0-based), for the conjugation model with simple limits.
 *
 * # Safety
 * `poly` must be a live handle; arrays and outputs as for [`hf_model_limits`].
 */
enum HfStatus hf_mixture_coefficients(const struct HfPolynomial *poly,
                                      const struct HfComplex *alphas,
                                      size_t r,
                                      const struct HfComplex *betas,
                                      size_t s,
                                      enum HfSide side,
                                      size_t index,
                                      struct HfComplex *out,
                                      size_t cap,
                                      size_t *len);

/**
 * Density of `sum c_j E_j` with `E_j` standard exponentials and distinct nonzero real `c_j`.
 *
 * # Safety
 * `coeffs` must hold `k` elements and `out` must be writable.
 */
enum HfStatus hf_expmixture_density(const double *coeffs, size_t k, double x, double *out);

/**
 * Distribution function matching [`hf_expmixture_density`].
 *
 * # Safety
 * As for [`hf_expmixture_density`].
 */
enum HfStatus hf_expmixture_cdf(const double *coeffs, size_t k, double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAAR_FLUCT_H */
