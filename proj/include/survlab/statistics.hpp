#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "survlab/rng.hpp"

namespace survlab {

struct ChiSquareResult {
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t n_bins = 0;
};

// Goodness of fit of counts against Poisson(mean) over bins {0..K, >= K+1},
// merged from both ends until every expected count is at least 5. The mean is
// given, not estimated, so dof = bins - 1. Needs at least 200 counts.
// mean = 0 with all counts zero gives chi2 = 0, p = 1; a single bin otherwise
// raises DegenerateFitError.
ChiSquareResult fit_poisson(std::span<const std::uint64_t> counts, double mean);

// Two-sample chi-square homogeneity test on a 2 x K table of count values,
// adjacent values merged until every expected cell is at least 5. Identical
// single-valued samples give chi2 = 0, p = 1.
ChiSquareResult two_sample_chi2(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

struct PgfPoint {
    double s = 0.0;
    double value = 0.0;    // mean of s^n, with 0^0 = 1
    double std_err = 0.0;  // bootstrap standard error
};

// Empirical generating function on s_grid with bootstrap standard errors from
// n_boot resamples drawn from `seed`.
std::vector<PgfPoint> empirical_pgf(std::span<const std::uint64_t> counts, std::span<const double> s_grid,
                                    RngSeed seed, std::size_t n_boot = 1000);

double sample_mean(std::span<const std::uint64_t> counts);
double sample_variance(std::span<const std::uint64_t> counts);

}  // namespace survlab
