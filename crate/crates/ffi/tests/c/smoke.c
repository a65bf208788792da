#include <math.h>
#include <stdio.h>
#include <string.h>

#include "haar_fluct.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            const char *msg = hf_last_error_message();               \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,   \
                    msg ? msg : "no message");                       \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    HfPolynomial *p = NULL;
    CHECK(hf_polynomial_parse("x + y + x*y*x + y*x*y", &p) == HF_STATUS_OK);

    char *text = NULL;
    CHECK(hf_polynomial_to_string(p, &text) == HF_STATUS_OK);
    printf("%s\n", text);
    hf_string_free(text);

    HfComplex alphas[] = {{5, 0}, {2, 0}, {1, 0}};
    HfComplex betas[] = {{4, 0}, {3, 0}, {-1, 0}};
    HfModel *m = NULL;
    CHECK(hf_model_new(HF_MODEL_KIND_CONJUGATION, p, alphas, 3, betas, 3, 400, &m) == HF_STATUS_OK);

    HfComplex limits[6];
    size_t len = 0;
    CHECK(hf_model_limits(m, limits, 6, &len) == HF_STATUS_OK && len == 6);
    CHECK(limits[1].re == 2.0 && limits[3].re == 4.0);

    HfComplex eigs[6];
    CHECK(hf_model_sample_eigenvalues(m, 1, 0, eigs, 6, &len) == HF_STATUS_OK);
    CHECK(fabs(eigs[1].re - 2.0) < 0.5);

    HfComplex coeffs[3];
    CHECK(hf_mixture_coefficients(p, alphas, 3, betas, 3, HF_SIDE_A, 1, coeffs, 3, &len) == HF_STATUS_OK);
    CHECK(len == 3 && fabs(coeffs[0].re - 12.0) < 1e-12);

    double rates[] = {12.0, 6.0, -14.0 / 3.0};
    double f = 0.0, lo = 0.0, hi = 0.0;
    CHECK(hf_expmixture_density(rates, 3, 1.0, &f) == HF_STATUS_OK && f > 0.0);
    CHECK(hf_expmixture_cdf(rates, 3, -1e3, &lo) == HF_STATUS_OK);
    CHECK(hf_expmixture_cdf(rates, 3, 1e3, &hi) == HF_STATUS_OK);
    CHECK(lo < 1e-12 && hi > 1.0 - 1e-12);

    HfPolynomial *bad = NULL;
    CHECK(hf_polynomial_parse("x +", &bad) == HF_STATUS_SYNTAX && bad == NULL);
    CHECK(hf_last_error_message() != NULL);

    hf_model_free(m);
    hf_polynomial_free(p);
    printf("ok\n");
    return 0;
}
