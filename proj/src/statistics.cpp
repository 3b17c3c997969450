#include "survlab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "survlab/errors.hpp"
#include "survlab/specfun.hpp"

namespace survlab {
namespace {

constexpr double kMinExpected = 5.0;
constexpr std::size_t kMinRecords = 200;

struct Bin {
    std::uint64_t lo;  // inclusive
    std::uint64_t hi;  // inclusive; UINT64_MAX for the open tail
    double expected;
    double observed = 0.0;
};

// P(X > k) for X ~ Poisson(mean), accurate in the far tail.
double poisson_sf(double mean, std::uint64_t k) {
    return specfun::reg_lower_gamma(static_cast<double>(k) + 1.0, mean);
}

double pow_count(double s, std::uint64_t n) {
    if (n == 0) return 1.0;
    return std::pow(s, static_cast<double>(n));
}

}  // namespace

double sample_mean(std::span<const std::uint64_t> counts) {
    if (counts.empty()) return 0.0;
    double s = 0.0;
    for (auto c : counts) s += static_cast<double>(c);
    return s / static_cast<double>(counts.size());
}

double sample_variance(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) return 0.0;
    const double m = sample_mean(counts);
    double s = 0.0;
    for (auto c : counts) s += (static_cast<double>(c) - m) * (static_cast<double>(c) - m);
    return s / static_cast<double>(counts.size() - 1);
}

ChiSquareResult fit_poisson(std::span<const std::uint64_t> counts, double mean) {
    if (counts.size() < kMinRecords) {
        throw DomainError("fit_poisson needs at least 200 records, got " + std::to_string(counts.size()));
    }
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite and non-negative");
    const double n = static_cast<double>(counts.size());
    const bool all_zero = std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; });
    if (mean == 0.0) {
        if (all_zero) return {0.0, 0, 1.0, 1};
        return {std::numeric_limits<double>::infinity(), 0, 0.0, 1};
    }

    // Left edge: the first value at which the cumulative expectation reaches 5
    // closes bin 0; then bins are closed greedily while the remaining tail
    // still carries at least 5 expected counts.
    std::vector<Bin> bins;
    std::uint64_t start = 0;
    double acc = 0.0;
    for (std::uint64_t k = 0;; ++k) {
        acc += n * specfun::poisson_pmf(mean, k);
        const double tail = n * poisson_sf(mean, k);
        if (tail < kMinExpected) {
            bins.push_back({start, UINT64_MAX, acc + tail});
            break;
        }
        if (acc >= kMinExpected) {
            bins.push_back({start, k, acc});
            start = k + 1;
            acc = 0.0;
        }
    }
    // The open tail bin may still fall short; merge it into its neighbour.
    while (bins.size() > 1 && bins.back().expected < kMinExpected) {
        const Bin last = bins.back();
        bins.pop_back();
        bins.back().hi = last.hi;
        bins.back().expected += last.expected;
    }
    if (bins.size() < 2) {
        throw DegenerateFitError("all expected Poisson mass falls in one bin (mean " + std::to_string(mean) +
                                 ", " + std::to_string(counts.size()) + " records)");
    }
    for (auto c : counts) {
        auto it = std::partition_point(bins.begin(), bins.end(), [c](const Bin& b) { return b.hi < c; });
        it->observed += 1.0;
    }
    ChiSquareResult r;
    for (const Bin& b : bins) r.chi2 += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
    r.n_bins = bins.size();
    r.dof = static_cast<int>(bins.size()) - 1;
    r.p_value = specfun::chi2_sf(r.dof, r.chi2);
    return r;
}

ChiSquareResult two_sample_chi2(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.empty() || b.empty()) throw DomainError("two_sample_chi2 needs two non-empty samples");
    std::map<std::uint64_t, std::pair<double, double>> table;
    for (auto c : a) table[c].first += 1.0;
    for (auto c : b) table[c].second += 1.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double total = na + nb;
    // A column with pooled count C has expected cells C * n_i / total; both are
    // at least 5 once C >= 5 total / min(n_a, n_b).
    const double need = kMinExpected * total / std::min(na, nb);

    std::vector<std::pair<double, double>> cols;
    std::pair<double, double> acc{0.0, 0.0};
    for (const auto& [value, cell] : table) {
        acc.first += cell.first;
        acc.second += cell.second;
        if (acc.first + acc.second >= need) {
            cols.push_back(acc);
            acc = {0.0, 0.0};
        }
    }
    if (acc.first + acc.second > 0.0) {
        if (cols.empty()) cols.push_back(acc);
        else {
            cols.back().first += acc.first;
            cols.back().second += acc.second;
        }
    }
    ChiSquareResult r;
    r.n_bins = cols.size();
    if (cols.size() < 2) return r;  // all values pooled into one column: no evidence of difference
    for (const auto& [oa, ob] : cols) {
        const double c = oa + ob;
        const double ea = c * na / total, eb = c * nb / total;
        r.chi2 += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    r.dof = static_cast<int>(cols.size()) - 1;
    r.p_value = specfun::chi2_sf(r.dof, r.chi2);
    return r;
}

std::vector<PgfPoint> empirical_pgf(std::span<const std::uint64_t> counts, std::span<const double> s_grid,
                                    RngSeed seed, std::size_t n_boot) {
    if (counts.empty()) throw DomainError("empirical_pgf needs at least one count");
    for (double s : s_grid)
        if (!(s >= 0.0 && s <= 1.0)) throw DomainError("pgf argument s must lie in [0, 1]");
    const std::size_t n = counts.size();
    const std::size_t g = s_grid.size();
    // powers[i * g + j] = s_j^counts[i]
    std::vector<double> powers(n * g);
    std::vector<PgfPoint> out(g);
    for (std::size_t j = 0; j < g; ++j) out[j].s = s_grid[j];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < g; ++j) {
            powers[i * g + j] = pow_count(s_grid[j], counts[i]);
            out[j].value += powers[i * g + j];
        }
    for (auto& p : out) p.value /= static_cast<double>(n);
    if (n_boot < 2) return out;

    RandomStream rng(seed);
    std::vector<double> sum(g, 0.0), sum2(g, 0.0), rep(g);
    for (std::size_t b = 0; b < n_boot; ++b) {
        std::fill(rep.begin(), rep.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
            const double* row = &powers[std::min(pick, n - 1) * g];
            for (std::size_t j = 0; j < g; ++j) rep[j] += row[j];
        }
        for (std::size_t j = 0; j < g; ++j) {
            const double m = rep[j] / static_cast<double>(n);
            sum[j] += m;
            sum2[j] += m * m;
        }
    }
    const double nb = static_cast<double>(n_boot);
    for (std::size_t j = 0; j < g; ++j) {
        const double mean = sum[j] / nb;
        out[j].std_err = std::sqrt(std::max(0.0, (sum2[j] - nb * mean * mean) / (nb - 1.0)));
    }
    return out;
}

}  // namespace survlab
