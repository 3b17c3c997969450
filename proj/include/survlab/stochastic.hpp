#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "survlab/geometry.hpp"
#include "survlab/rng.hpp"

namespace survlab {

// Time discretisation and noise loading of dX = B^T dW (covariance sigma = B^T B
// per unit time). Gaussian increments are exact; only boundary detection is
// discretised.
struct PathConfig {
    double dt = 1e-4;
    double t_end = 1.0;
    bool bridge_correction = true;
    Eigen::MatrixXd b_matrix;

    // B = L^T with sigma = L L^T (Cholesky).
    static PathConfig for_domain(const DomainSpec& domain, double dt, double t_end, bool bridge = true);

    // Throws DomainError unless 0 < dt <= t_end, B is d x d and B^T B matches
    // the domain's sigma within 1e-12.
    void validate(const DomainSpec& domain) const;
};

struct PathOutcome {
    bool survived = false;
    double absorbed_at = 0.0;  // time of the step that detected absorption
    std::size_t steps = 0;
};

struct SurvivalEstimate {
    double p_hat = 0.0;
    double std_err = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_survived = 0;
};

struct BiasRow {
    double dt = 0.0;
    double p_hat = 0.0;
    double std_err = 0.0;
};

// Probability that a Brownian bridge with variance rate `variance` across one
// face, over a step of length dt, touches the face given endpoint distances
// d0, d1 >= 0: exp(-2 d0 d1 / (variance dt)). Equals 1 when either distance is 0.
double crossing_probability(double d0, double d1, double variance, double dt) noexcept;

// Simulates one path from x0 until absorption or t_end. Absorption exactly at
// t_end counts as absorbed. Throws DomainError if x0 is not inside Q.
PathOutcome simulate_until_absorbed(const DomainSpec& domain, const PathConfig& cfg, const Point& x0,
                                    RngSeed seed);

// Same, drawing from an existing stream.
PathOutcome simulate_until_absorbed(const DomainSpec& domain, const PathConfig& cfg, const Point& x0,
                                    RandomStream& rng);

// Path i uses stream seed.child(i); the result does not depend on `threads`
// (0 = hardware concurrency).
SurvivalEstimate estimate_survival(const DomainSpec& domain, const PathConfig& cfg, const Point& x0,
                                   std::size_t n_paths, RngSeed seed, unsigned threads = 0);

// Survival estimates for each step in a strictly decreasing dt grid; row k uses
// stream seed.child(k).
std::vector<BiasRow> bias_probe(const DomainSpec& domain, const Point& x0, double t_end,
                                const std::vector<double>& dt_grid, std::size_t n_paths, RngSeed seed,
                                bool bridge_correction = true, unsigned threads = 0);

}  // namespace survlab
