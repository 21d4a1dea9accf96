#pragma once

// Chi-square family special functions. Absolute accuracy target is 1e-10.

namespace ggmlrt {

// log Gamma(x) for x > 0.
double ln_gamma(double x);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
// Series for x < a + 1, Lentz continued fraction otherwise.
double reg_gamma_lower(double a, double x);
double reg_gamma_upper(double a, double x);

// Survival function of chi-square with k degrees of freedom.
// Returns 1 for x < 0 so that negative adjusted increments map to p = 1.
double chi2_sf(double x, double k);
double chi2_cdf(double x, double k);
double chi2_pdf(double x, double k);

// Inverse of chi2_cdf for u in (0, 1).
double chi2_quantile(double u, double k);

// Poisson(lambda/2) mixture of central survival functions.
double noncentral_chi2_sf(double x, double k, double lambda);
double noncentral_chi2_pdf(double x, double k, double lambda);

}  // namespace ggmlrt
