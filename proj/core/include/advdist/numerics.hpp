#pragma once

// Special functions used throughout the rate calculations: Gaussian
// CDF/quantile, regularized incomplete gamma, noncentral chi-square CDF /
// generalized Marcum Q, and the entropy functions h and g.
//
// All functions here are pure and thread-safe.

namespace advdist {

// Parameters of a noncentral chi-square distribution. Mean is
// dof + noncentrality, variance 2*dof + 4*noncentrality.
struct NoncentralChi2Params {
    double dof = 1.0;            // n >= 1 (any positive real accepted)
    double noncentrality = 0.0;  // lambda >= 0
};

// h(p) = p log2(1/p) + (1-p) log2(1/(1-p)), in bits. Endpoints return 0.
// Throws std::domain_error outside [0,1].
double binary_entropy(double p);

// g(x) = (x+1) log2(x+1) - x log2(x), in bits. g(0) = 0.
// Throws std::domain_error for x < 0.
double thermal_entropy_g(double x);

// CDF of a zero-mean Gaussian with standard deviation sigma, evaluated at y.
// Throws std::domain_error for sigma <= 0.
double gaussian_cdf(double y, double sigma);

// Inverse of gaussian_cdf in its first argument. Requires 0 < p < 1;
// p in {0,1} throws std::domain_error (saturation - callers clamp first).
double gaussian_cdf_inv(double p, double sigma);

// Standard-normal versions (sigma = 1). The quantile is Wichura's AS 241
// rational approximation refined with one Newton step.
double std_normal_cdf(double x);
double std_normal_quantile(double p);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
// a > 0, x >= 0. Series / continued-fraction split at x = a + 1.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// CDF of the noncentral chi-square distribution at z >= 0, computed as a
// Poisson-weighted mixture of central chi-square CDFs. Relative error
// ~1e-13 for dof <= 1e4 and noncentrality <= 1e6.
double noncentral_chi2_cdf(double z, const NoncentralChi2Params& params);

// Survival function 1 - CDF, computed on the upper side directly so small
// tail probabilities keep full relative accuracy.
double noncentral_chi2_sf(double z, const NoncentralChi2Params& params);

// Generalized Marcum Q-function, Q_order(a, b) for real order > 0:
// Q_order(a,b) = 1 - F_ncx2(b^2; dof = 2*order, lambda = a^2).
double marcum_q(double order, double a, double b);

}  // namespace advdist
