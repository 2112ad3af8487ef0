#pragma once

// Scalar special functions used throughout: normal CDF/quantile, stable
// log tail probabilities, regularized incomplete gamma and the chi-square
// upper tail. Plain <cmath> only, no external math dependency.

namespace survmix {

double std_normal_pdf(double x);

// Phi(x) = P(Z <= x), accurate to ~1 ulp via erfc.
double std_normal_cdf(double x);

// 1 - Phi(x), accurate in the upper tail (no cancellation).
double std_normal_sf(double x);

// log(1 - Phi(x)), finite far beyond the underflow point of the plain tail.
double log_std_normal_sf(double x);

// Inverse of Phi on (0,1). Rational initial guess polished by one Halley step
// against std_normal_cdf, so quantile/CDF round-trips hold to ~1e-14.
double std_normal_quantile(double p);

// Regularized incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a), a > 0, x >= 0.
// Series for x < a+1, continued fraction otherwise.
double regularized_gamma_q(double a, double x);

// P(Chi2_df > x). df >= 1 integer, x >= 0.
double chi_square_sf(double x, int df);

double expit(double x);
double logit(double p);

// log(e^a + e^b) without overflow; handles -inf arguments.
double log_sum_exp(double a, double b);

// log(1 + e^x) without overflow.
double softplus(double x);

}  // namespace survmix
