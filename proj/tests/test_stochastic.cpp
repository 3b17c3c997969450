#include <doctest.h>

#include <cmath>
#include <numbers>

#include "survlab/errors.hpp"
#include "survlab/spectral.hpp"
#include "survlab/stochastic.hpp"

using namespace survlab;
using std::numbers::pi;

namespace {

bool within(double a, double b, double k, double se) { return std::abs(a - b) <= k * se; }

double pooled(const SurvivalEstimate& a, const SurvivalEstimate& b) {
    return std::sqrt(a.std_err * a.std_err + b.std_err * b.std_err);
}

}  // namespace

TEST_CASE("crossing probability") {
    CHECK(crossing_probability(0.0, 0.3, 1.0, 1e-3) == 1.0);
    CHECK(crossing_probability(0.3, 0.0, 1.0, 1e-3) == 1.0);
    CHECK(crossing_probability(1.0, 1.0, 1.0, 1e-4) == 0.0);
    CHECK(std::abs(crossing_probability(0.01, 0.02, 2.0, 1e-3) - std::exp(-0.2)) <= 1e-15);
    for (double d0 : {1e-6, 1e-3, 0.05, 0.5})
        for (double d1 : {1e-6, 1e-3, 0.05, 0.5}) {
            const double p = crossing_probability(d0, d1, 1.0, 1e-3);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
}

TEST_CASE("path configuration") {
    const auto disk = DomainSpec::disk(1.0, 2.0);
    const auto cfg = PathConfig::for_domain(disk, 1e-3, 1.0);
    CHECK((cfg.b_matrix.transpose() * cfg.b_matrix - disk.sigma()).cwiseAbs().maxCoeff() <= 1e-12);

    PathConfig bad = cfg;
    bad.b_matrix(0, 0) *= 1.01;
    CHECK_THROWS_AS(bad.validate(disk), DomainError);
    CHECK_THROWS_AS(PathConfig::for_domain(disk, 2.0, 1.0), DomainError);
    CHECK_THROWS_AS(PathConfig::for_domain(disk, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(simulate_until_absorbed(disk, cfg, Point{1.0, 0.0}, RngSeed{1, 0}), DomainError);
    CHECK_THROWS_AS(simulate_until_absorbed(disk, cfg, Point{0.0}, RngSeed{1, 0}), DomainError);
}

TEST_CASE("first increment leaving Q absorbs at step one") {
    const auto narrow = DomainSpec::interval(1e-9, 1.0);
    const auto cfg = PathConfig::for_domain(narrow, 0.5, 1.0, false);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto out = simulate_until_absorbed(narrow, cfg, Point{0.5e-9}, RngSeed{s, 0});
        CHECK_FALSE(out.survived);
        CHECK(out.steps == 1);
        CHECK(out.absorbed_at == 0.5);
    }
}

TEST_CASE("determinism across runs and thread counts") {
    const auto disk = DomainSpec::disk(1.0, 1.0);
    const auto cfg = PathConfig::for_domain(disk, 1e-3, 0.5);
    const auto a = simulate_until_absorbed(disk, cfg, Point{0.2, 0.1}, RngSeed{5, 9});
    const auto b = simulate_until_absorbed(disk, cfg, Point{0.2, 0.1}, RngSeed{5, 9});
    CHECK(a.survived == b.survived);
    CHECK(a.absorbed_at == b.absorbed_at);
    CHECK(a.steps == b.steps);
    const auto e1 = estimate_survival(disk, cfg, Point{0.0, 0.0}, 3000, RngSeed{77, 0}, 1);
    const auto e3 = estimate_survival(disk, cfg, Point{0.0, 0.0}, 3000, RngSeed{77, 0}, 3);
    CHECK(e1.n_survived == e3.n_survived);
}

TEST_CASE("trivial estimates") {
    const auto interval = DomainSpec::interval(1.0, 1.0);
    const auto one = estimate_survival(interval, PathConfig::for_domain(interval, 1e-3, 0.1), Point{0.5}, 1,
                                       RngSeed{3, 0});
    CHECK((one.p_hat == 0.0 || one.p_hat == 1.0));
    CHECK(one.std_err == 0.0);
    const auto quick = estimate_survival(interval, PathConfig::for_domain(interval, 1e-8, 1e-8), Point{0.5},
                                         1000, RngSeed{3, 1});
    CHECK(quick.p_hat == 1.0);
}

TEST_CASE("interval survival matches the spectral series") {
    // With the bridge test the per-face crossing law is exact, so a coarse
    // step already matches the series.
    SUBCASE("L = pi, t = 2, midpoint") {
        const auto interval = DomainSpec::interval(pi, 1.0);
        const double u = SurvivalEvaluator::certified(interval).survival(2.0, Point{pi / 2});
        const auto est = estimate_survival(interval, PathConfig::for_domain(interval, 1e-3, 2.0), Point{pi / 2},
                                           100000, RngSeed{2024, 1});
        CHECK(within(est.p_hat, u, 3.0, est.std_err));
    }
    SUBCASE("L = 1, t = 2, midpoint (rare survival)") {
        const auto interval = DomainSpec::interval(1.0, 1.0);
        const double u = SurvivalEvaluator::certified(interval).survival(2.0, Point{0.5});
        CHECK(std::abs(u - 6.5856006054394075e-05) <= 1e-12);
        const auto est = estimate_survival(interval, PathConfig::for_domain(interval, 1e-3, 2.0), Point{0.5},
                                           100000, RngSeed{2024, 2});
        // binomial s.e. at the true value; the plug-in s.e. is 0 when no path survives
        CHECK(within(est.p_hat, u, 3.0, std::sqrt(u * (1 - u) / 100000)));
    }
}

TEST_CASE("box survival with per-face bridge tests matches the tensor series") {
    const auto box = DomainSpec::box({1.0, 1.5}, Eigen::MatrixXd::Identity(2, 2));
    const Point x0{0.4, 0.7};
    const double u = SurvivalEvaluator::certified(box).survival(0.15, x0);
    const auto est =
        estimate_survival(box, PathConfig::for_domain(box, 1e-3, 0.15), x0, 40000, RngSeed{31, 0});
    CHECK(within(est.p_hat, u, 3.0, est.std_err));
}

TEST_CASE("symmetry and scale consistency") {
    const auto interval = DomainSpec::interval(1.0, 1.0);
    const auto cfg = PathConfig::for_domain(interval, 1e-3, 0.2);
    const auto left = estimate_survival(interval, cfg, Point{0.3}, 20000, RngSeed{8, 0});
    const auto right = estimate_survival(interval, cfg, Point{0.7}, 20000, RngSeed{8, 1});
    CHECK(within(left.p_hat, right.p_hat, 3.0, pooled(left, right)));

    // x -> 2x, sigma -> 4 sigma
    const auto wide = DomainSpec::interval(2.0, 4.0);
    const auto scaled = estimate_survival(wide, PathConfig::for_domain(wide, 1e-3, 0.2), Point{0.6}, 20000,
                                          RngSeed{8, 2});
    CHECK(within(left.p_hat, scaled.p_hat, 3.0, pooled(left, scaled)));
}

TEST_CASE("general sigma is simulated without a series") {
    Eigen::MatrixXd s(2, 2);
    s << 1.0, 0.6, 0.6, 0.8;
    const auto box = DomainSpec::box({1.0, 1.0}, s);
    CHECK_THROWS_AS(build_basis(box, 1), UnsupportedDomainError);
    const auto est = estimate_survival(box, PathConfig::for_domain(box, 1e-3, 0.05), Point{0.5, 0.5}, 5000,
                                       RngSeed{4, 0});
    CHECK(est.p_hat > 0.0);
    CHECK(est.p_hat < 1.0);
}

TEST_CASE("bias probe") {
    const auto disk = DomainSpec::disk(1.0, 1.0);
    const double u = SurvivalEvaluator::certified(disk).survival(1.0, Point{0.0, 0.0});
    SUBCASE("without the bridge test survival is overestimated and shrinks with dt") {
        const auto rows = bias_probe(disk, Point{0.0, 0.0}, 1.0, {1e-2, 1e-3}, 20000, RngSeed{99, 0}, false);
        for (const auto& r : rows) CHECK(r.p_hat > u + 2.0 * r.std_err);
        CHECK(std::abs(rows[1].p_hat - u) < std::abs(rows[0].p_hat - u));
    }
    SUBCASE("with the bridge test the residual is small") {
        const auto rows = bias_probe(disk, Point{0.0, 0.0}, 1.0, {1e-2, 1e-3}, 20000, RngSeed{99, 1}, true);
        CHECK(within(rows[1].p_hat, u, 3.0, rows[1].std_err));
    }
    CHECK_THROWS_AS(bias_probe(disk, Point{0.0, 0.0}, 1.0, {1e-3, 1e-2}, 10, RngSeed{1, 0}), DomainError);
}
