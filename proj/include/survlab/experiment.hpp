#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survlab/geometry.hpp"
#include "survlab/measure.hpp"
#include "survlab/pointprocess.hpp"
#include "survlab/rng.hpp"
#include "survlab/spectral.hpp"
#include "survlab/statistics.hpp"

namespace survlab {

enum class Method { monte_carlo, exact_thinning };

const char* to_string(Method method) noexcept;

struct ReplicationRecord {
    std::size_t index = 0;
    double tau = 0.0;
    Method method = Method::exact_thinning;
    std::uint64_t n_initial = 0;
    std::uint64_t n_survivors = 0;
    RngSeed seed;
    std::uint64_t positions_digest = 0;  // FNV-1a over the initial coordinates
};

struct ReplicationOptions {
    double dt = 1e-4;
    bool bridge_correction = true;
    // Refuse Monte Carlo runs whose expected particle-steps exceed this.
    double step_budget = 5e9;
    // Refuse runs whose expected initial particle count exceeds this.
    double particle_budget = 5e7;
    unsigned threads = 0;
};

// n_reps independent replications. Replication r draws its configuration from
// seed.child(r).child(0) and its survival marks or paths from seed.child(r).child(1),
// so records depend only on the seed. exact_thinning keeps each point with
// probability u(tau, x) from `evaluator` (built from the domain when null);
// monte_carlo simulates every particle to time tau.
std::vector<ReplicationRecord> run_replications(const DomainSpec& domain, const ScalingRule& rule, double tau,
                                                std::size_t n_reps, Method method, RngSeed seed,
                                                const ReplicationOptions& options = {},
                                                const SurvivalEvaluator* evaluator = nullptr);

std::vector<std::uint64_t> survivor_counts(std::span<const ReplicationRecord> records);

// Goodness of fit of the survivor counts against Poisson(mean).
ChiSquareResult fit_poisson(std::span<const ReplicationRecord> records, double mean);

struct BandExtrema {
    double min = 0.0;
    double max = 0.0;
    bool exact = true;
};

// min and max of u(tau, .) over band k: exact from radial monotonicity on the
// disk and from unimodality on the interval, otherwise from 1000 sample points
// per band (exact = false).
BandExtrema band_extrema(const SurvivalEvaluator& evaluator, const BandPartition& bands, std::size_t k, double tau);

struct SandwichBound {
    double s = 0.0;
    std::size_t n_bands = 0;
    double lower = 0.0;
    double upper = 0.0;
    double tau = 0.0;
    bool approximate = false;
};

// lower = exp sum_k (s a_k - b_k) m(B_k, tau), upper = exp sum_k (s b_k - a_k) m(B_k, tau)
// with a_k, b_k the band min and max of u(tau, .). Bands with zero nu-mass are skipped.
std::vector<SandwichBound> sandwich(const SurvivalEvaluator& evaluator, const BandPartition& bands,
                                    const ScalingRule& rule, double tau, std::span<const double> s_grid);

// Same, on the level sets of F with n_bands bands.
std::vector<SandwichBound> sandwich(const SurvivalEvaluator& evaluator, const ScalingRule& rule, double tau,
                                    std::size_t n_bands, std::span<const double> s_grid);

struct ConvergenceRow {
    double tau = 0.0;
    double a_tau = 0.0;
    double abs_gap = 0.0;
};

struct ConvergenceTable {
    double a = 0.0;
    std::vector<ConvergenceRow> rows;
    // Observed and predicted ratios of consecutive gaps; predicted from the
    // first contributing eigenvalue gap.
    std::vector<double> ratios;
    std::vector<double> predicted;
    bool monotone = true;
    bool rate_ok = true;  // every ratio within 20% of its prediction
};

// a_tau over an increasing tau grid (all tau >= t_min).
ConvergenceTable convergence_table(std::span<const Mode> basis, const MeasureSpec& nu,
                                   std::span<const double> tau_grid, double t_min);

struct Check {
    std::string name;
    double statistic = 0.0;
    std::string threshold;
    bool pass = false;
    bool gated = true;
};

struct VerificationPlan {
    DomainSpec domain = DomainSpec::disk(1.0, 1.0);
    std::optional<MeasureSpec> measure;  // Lebesgue when empty
    std::optional<double> lambda1;       // override of the ground eigenvalue in g
    ScalingRule::Schedule schedule = ScalingRule::Schedule::exact;
    double tau = 1.0;
    std::vector<double> tau_grid{0.5, 1.0, 1.5, 2.0};
    std::size_t n_reps = 2000;
    bool monte_carlo = true;
    ReplicationOptions options;
    std::size_t n_bands = 20;
    std::vector<double> s_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::optional<double> t_min;
    double tol = 1e-10;
    std::uint64_t seed = 42;
    bool gate = true;  // false: report only (fresh-seed runs)
    double alpha = 1e-3;
};

struct VerificationReport {
    std::uint64_t seed = 0;
    double a = 0.0;
    double a_tau = 0.0;
    std::vector<Check> checks;
    std::vector<ReplicationRecord> thinning;
    std::vector<ReplicationRecord> monte_carlo;
    std::vector<SandwichBound> bounds;
    std::vector<PgfPoint> pgf;
    ConvergenceTable convergence;

    bool passed() const;
    // One line per check: name, statistic, threshold, PASS/FAIL.
    std::string check_lines() const;
};

// Runs thinning (and optionally Monte Carlo) replications, Poisson fits
// against a_tau and a, the two-sample test, sandwich bounds against the
// empirical pgf, and the convergence table. Throws TruncationError before any
// sampling when tau < t_min.
VerificationReport full_verification(const VerificationPlan& plan);

}  // namespace survlab
