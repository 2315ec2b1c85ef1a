#include <math.h>
#include <stdio.h>

#include "specfact.h"

int main(void) {
    /* 5 + 2z + 2/z, lowest power -1 */
    const double re[] = {2.0, 5.0, 2.0};
    SpecfactPoly *s = NULL, *p = NULL;
    SpecfactFactor *f = NULL;
    double out_re[2], out_im[2];
    size_t n = 0;

    if (specfact_poly_new(1, -1, 3, SPECFACT_DOMAIN_DISC, re, NULL, &s) != SPECFACT_STATUS_OK) return 1;
    if (specfact_factorize(s, true, 0, &f) != SPECFACT_STATUS_OK) {
        fprintf(stderr, "%s\n", specfact_last_error());
        return 2;
    }
    if (specfact_factor_poly(f, &p) != SPECFACT_STATUS_OK) return 3;
    if (specfact_poly_shape(p, NULL, NULL, &n, NULL) != SPECFACT_STATUS_OK || n != 2) return 4;
    if (specfact_poly_coeffs(p, out_re, out_im, 2) != SPECFACT_STATUS_OK) return 5;
    if (specfact_poly_new(1, 0, 1, 7, re, NULL, &s) != SPECFACT_STATUS_INVALID_ARGUMENT) return 6;
    if (specfact_last_error() == NULL) return 7;
    printf("%.0f %.0f\n", round(out_re[0]), round(out_re[1]));
    specfact_poly_free(p);
    specfact_factor_free(f);
    specfact_poly_free(s);
    return 0;
}
