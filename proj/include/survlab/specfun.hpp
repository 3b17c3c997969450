#pragma once

#include <cstdint>
#include <vector>

// Scalar special functions: Bessel J0/J1 and the zeros of J0, the regularized
// incomplete gamma functions, and the Poisson distribution.
//
// All functions are pure and thread-safe.
namespace survlab::specfun {

/// J_order(x) for order 0 or 1, x >= 0. Absolute error below 1e-13 on [0, 200].
double bessel_j(int order, double x);
double bessel_j0(double x);
double bessel_j1(double x);

struct BesselPair {
    double j0;
    double j1;
};

/// J0 and J1 from a single evaluation.
BesselPair bessel_j01(double x);

/// m-th positive zero of J0, m >= 1, absolute error below 1e-12.
///
/// The zero is bracketed in ((m - 3/4) pi, (m + 1/4) pi), narrowed by bisection
/// and polished with Newton steps using J0' = -J1.
double bessel_j0_root(int m);

struct BesselRootTable {
    int order = 0;
    std::vector<double> roots;  // strictly increasing
    double tolerance = 1e-12;   // absolute error bound per root
};

BesselRootTable bessel_j0_roots(int count);

/// Smallest x in [0, first zero of J0] with J0(x) = level, for level in [0, 1].
double bessel_j0_inverse_on_main_lobe(double level);

/// Regularized lower incomplete gamma P(shape, x).
double reg_lower_gamma(double shape, double x);
/// Regularized upper incomplete gamma Q(shape, x) = 1 - P(shape, x), computed
/// without cancellation for large x.
double reg_upper_gamma(double shape, double x);

double chi2_cdf(double dof, double x);
double chi2_sf(double dof, double x);

double log_factorial(std::uint64_t k);
double poisson_log_pmf(double mean, std::uint64_t k);
double poisson_pmf(double mean, std::uint64_t k);
/// P(X <= k) for X ~ Poisson(mean).
double poisson_cdf(double mean, std::uint64_t k);

}  // namespace survlab::specfun
