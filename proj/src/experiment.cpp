#include "survlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "survlab/errors.hpp"
#include "survlab/parallel.hpp"
#include "survlab/stochastic.hpp"

namespace survlab {
namespace {

constexpr std::size_t kSamplesPerBand = 1000;

std::uint64_t fnv1a(const std::vector<Point>& pts) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const Point& p : pts) {
        for (double c : p.coords()) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &c, sizeof(double));
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 0x100000001b3ull;
            }
        }
    }
    return h;
}

double radical_inverse(std::size_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

// Band extrema from a Halton point set in Q with about kSamplesPerBand points
// per band on average. Bands that receive no sample get the trivial [0, 1].
std::vector<BandExtrema> sampled_extrema(const SurvivalEvaluator& ev, const BandPartition& bands, double tau) {
    static constexpr unsigned kPrimes[kMaxDim] = {2, 3, 5, 7, 11, 13, 17, 19};
    const DomainSpec& domain = ev.domain();
    const std::size_t n = bands.size() * kSamplesPerBand;
    std::vector<BandExtrema> out(bands.size(), {1.0, 0.0, false});
    std::vector<bool> seen(bands.size(), false);
    Point x(domain.dim());
    for (std::size_t i = 1; i <= n; ++i) {
        if (domain.kind() == DomainKind::disk) {
            const double r = domain.radius() * std::sqrt(radical_inverse(i, 2));
            const double th = 2.0 * M_PI * radical_inverse(i, 3);
            x = Point{r * std::cos(th), r * std::sin(th)};
        } else {
            for (std::size_t a = 0; a < domain.dim(); ++a) x[a] = domain.lengths()[a] * radical_inverse(i, kPrimes[a]);
        }
        if (!domain.contains(x)) continue;
        const std::size_t k = bands.band_of(x);
        const double u = ev.survival(tau, x);
        out[k].min = std::min(out[k].min, u);
        out[k].max = std::max(out[k].max, u);
        seen[k] = true;
    }
    for (std::size_t k = 0; k < out.size(); ++k)
        if (!seen[k]) out[k] = {0.0, 1.0, false};
    return out;
}

std::vector<BandExtrema> all_extrema(const SurvivalEvaluator& ev, const BandPartition& bands, double tau) {
    const DomainSpec& domain = ev.domain();
    std::vector<BandExtrema> out;
    out.reserve(bands.size());
    if (domain.kind() == DomainKind::disk) {
        // u is radially decreasing
        for (std::size_t k = 0; k < bands.size(); ++k) {
            const auto [r_in, r_out] = bands.radii(k);
            out.push_back({ev.survival(tau, Point{r_out, 0.0}), ev.survival(tau, Point{r_in, 0.0}), true});
        }
        return out;
    }
    if (domain.kind() == DomainKind::interval && bands.kind() == BandRegion::Kind::level_set) {
        // u is symmetric about L/2 and increasing on [0, L/2]
        for (std::size_t k = 0; k < bands.size(); ++k) {
            const auto [a, b] = bands.half_segment(k);
            out.push_back({ev.survival(tau, Point{a}), ev.survival(tau, Point{b}), true});
        }
        return out;
    }
    return sampled_extrema(ev, bands, tau);
}

template <class F>
auto with_context(const char* step, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const TruncationError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("verification step '") + step + "' failed: " + e.what());
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

const char* to_string(Method method) noexcept {
    return method == Method::monte_carlo ? "monte_carlo" : "exact_thinning";
}

std::vector<ReplicationRecord> run_replications(const DomainSpec& domain, const ScalingRule& rule, double tau,
                                                std::size_t n_reps, Method method, RngSeed seed,
                                                const ReplicationOptions& options,
                                                const SurvivalEvaluator* evaluator) {
    if (n_reps == 0) throw DomainError("n_reps must be positive");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau must be finite and non-negative");
    const double mean = rule.total_intensity(tau);
    const double reps = static_cast<double>(n_reps);
    if (reps * mean > options.particle_budget) {
        throw CapacityError("expected " + fmt(reps * mean) + " initial particles exceeds the budget of " +
                            fmt(options.particle_budget));
    }

    std::optional<SurvivalEvaluator> own;
    std::optional<PathConfig> path;
    if (method == Method::exact_thinning) {
        if (!evaluator) {
            own.emplace(SurvivalEvaluator::certified(domain));
            evaluator = &*own;
        }
        if (tau > 0.0 && tau < evaluator->t_min()) {
            throw TruncationError("tau = " + fmt(tau) + " is below the evaluator's t_min = " + fmt(evaluator->t_min()));
        }
    } else if (tau > 0.0) {
        const double steps = reps * mean * std::ceil(tau / options.dt);
        if (steps > options.step_budget) {
            throw CapacityError("expected " + fmt(steps) + " particle-steps exceeds the budget of " +
                                fmt(options.step_budget));
        }
        path = PathConfig::for_domain(domain, std::min(options.dt, tau), tau, options.bridge_correction);
    }

    return parallel_map(n_reps, options.threads, [&](std::size_t r) {
        ReplicationRecord rec;
        rec.index = r;
        rec.tau = tau;
        rec.method = method;
        rec.seed = seed.child(r);
        const auto config = sample_configuration(rule, tau, rec.seed.child(0));
        rec.n_initial = config.size();
        rec.positions_digest = fnv1a(config);
        if (tau == 0.0) {
            rec.n_survivors = rec.n_initial;
            return rec;
        }
        const RngSeed marks = rec.seed.child(1);
        if (method == Method::exact_thinning) {
            RandomStream rng(marks);
            for (const Point& x : config) rec.n_survivors += rng.uniform() < evaluator->survival(tau, x) ? 1 : 0;
        } else {
            for (std::size_t i = 0; i < config.size(); ++i) {
                RandomStream rng(marks.child(i));
                rec.n_survivors += simulate_until_absorbed(domain, *path, config[i], rng).survived ? 1 : 0;
            }
        }
        return rec;
    });
}

std::vector<std::uint64_t> survivor_counts(std::span<const ReplicationRecord> records) {
    std::vector<std::uint64_t> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.n_survivors);
    return out;
}

ChiSquareResult fit_poisson(std::span<const ReplicationRecord> records, double mean) {
    return fit_poisson(std::span<const std::uint64_t>(survivor_counts(records)), mean);
}

BandExtrema band_extrema(const SurvivalEvaluator& evaluator, const BandPartition& bands, std::size_t k, double tau) {
    if (k >= bands.size()) throw DomainError("band index out of range");
    return all_extrema(evaluator, bands, tau)[k];
}

std::vector<SandwichBound> sandwich(const SurvivalEvaluator& evaluator, const BandPartition& bands,
                                    const ScalingRule& rule, double tau, std::span<const double> s_grid) {
    if (bands.size() < 2) throw DomainError("sandwich bounds need at least 2 bands");
    if (tau < evaluator.t_min()) {
        throw TruncationError("tau = " + fmt(tau) + " is below the evaluator's t_min = " + fmt(evaluator.t_min()));
    }
    const auto ext = all_extrema(evaluator, bands, tau);
    bool approximate = !bands.mass_is_exact();
    std::vector<double> m(bands.size());
    for (std::size_t k = 0; k < bands.size(); ++k) {
        m[k] = rule.intensity(bands.mass(rule.measure(), k), tau);
        if (m[k] > 0.0 && !ext[k].exact) approximate = true;
    }
    std::vector<SandwichBound> out;
    for (double s : s_grid) {
        if (!(s >= 0.0 && s <= 1.0)) throw DomainError("s must lie in [0, 1]");
        double lo = 0.0, hi = 0.0;
        for (std::size_t k = 0; k < bands.size(); ++k) {
            if (m[k] == 0.0) continue;
            lo += (s * ext[k].min - ext[k].max) * m[k];
            hi += (s * ext[k].max - ext[k].min) * m[k];
        }
        out.push_back({s, bands.size(), std::exp(lo), std::exp(hi), tau, approximate});
    }
    return out;
}

std::vector<SandwichBound> sandwich(const SurvivalEvaluator& evaluator, const ScalingRule& rule, double tau,
                                    std::size_t n_bands, std::span<const double> s_grid) {
    const auto bands = BandPartition::level_sets(limit_shape(evaluator.modes()), n_bands);
    return sandwich(evaluator, bands, rule, tau, s_grid);
}

ConvergenceTable convergence_table(std::span<const Mode> basis, const MeasureSpec& nu,
                                   std::span<const double> tau_grid, double t_min) {
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (tau_grid[i] < t_min) throw TruncationError("tau grid entry " + fmt(tau_grid[i]) + " is below t_min");
        if (i > 0 && !(tau_grid[i] > tau_grid[i - 1])) throw DomainError("tau grid must be strictly increasing");
    }
    ConvergenceTable table;
    table.a = poisson_parameter(basis, nu);
    const double lambda1 = basis.front().lambda;
    for (double tau : tau_grid) {
        ConvergenceRow row{tau, poisson_parameter_at(basis, nu, tau), 0.0};
        if (nu.is_lebesgue()) {
            // Sum the non-ground terms directly; a_tau - a would cancel.
            double gap = 0.0;
            for (auto it = basis.rbegin(); it != basis.rend(); ++it)
                if (it->j > 1) gap += std::exp(-0.5 * tau * (it->lambda - lambda1)) * it->c * it->c;
            row.abs_gap = nu.weight() * gap;
        } else {
            row.abs_gap = std::abs(row.a_tau - table.a);
        }
        table.rows.push_back(row);
    }
    const double spectral_gap = first_contributing_gap(basis);
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const auto& prev = table.rows[i - 1];
        const auto& cur = table.rows[i];
        if (cur.abs_gap > prev.abs_gap) table.monotone = false;
        const double ratio = prev.abs_gap > 0.0 ? cur.abs_gap / prev.abs_gap : 0.0;
        const double predicted = std::exp(-0.5 * (cur.tau - prev.tau) * spectral_gap);
        table.ratios.push_back(ratio);
        table.predicted.push_back(predicted);
        if (!(std::abs(ratio - predicted) <= 0.2 * predicted)) table.rate_ok = false;
    }
    return table;
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.gated || c.pass; });
}

std::string VerificationReport::check_lines() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << std::left << std::setw(34) << c.name << ' ' << std::setw(14) << fmt(c.statistic) << ' '
           << std::setw(28) << c.threshold << ' ' << (c.pass ? "PASS" : "FAIL") << (c.gated ? "" : " (not gated)")
           << '\n';
    }
    return os.str();
}

VerificationReport full_verification(const VerificationPlan& plan) {
    const DomainSpec& domain = plan.domain;
    const double t_min = plan.t_min.value_or(domain.default_t_min());
    if (plan.tau < t_min) {
        throw TruncationError("tau = " + fmt(plan.tau) + " is below t_min = " + fmt(t_min) + "; refusing to sample");
    }
    for (double t : plan.tau_grid)
        if (t < t_min) throw TruncationError("convergence grid entry " + fmt(t) + " is below t_min = " + fmt(t_min));

    VerificationReport report;
    report.seed = plan.seed;
    const RngSeed root{plan.seed, 0};
    const auto evaluator =
        with_context("spectral", [&] { return SurvivalEvaluator::certified(domain, t_min, plan.tol); });
    const auto& basis = evaluator.modes();
    const MeasureSpec nu = plan.measure.value_or(MeasureSpec::lebesgue(domain));
    const ScalingRule rule(nu, plan.lambda1.value_or(basis.front().lambda), plan.schedule);

    report.a = with_context("poisson parameter", [&] { return poisson_parameter(basis, nu); });
    report.a_tau = with_context("poisson parameter", [&] { return poisson_parameter_at(basis, nu, plan.tau); });

    auto add = [&](std::string name, double stat, std::string threshold, bool pass) {
        report.checks.push_back({std::move(name), stat, std::move(threshold), pass, plan.gate});
    };
    const std::string p_threshold = "p >= " + fmt(plan.alpha);

    report.thinning = with_context("exact thinning", [&] {
        return run_replications(domain, rule, plan.tau, plan.n_reps, Method::exact_thinning, root.child(1),
                                plan.options, &evaluator);
    });
    const auto thin_counts = survivor_counts(report.thinning);
    {
        const double mean = sample_mean(thin_counts);
        const double bound = 4.0 * std::sqrt(report.a_tau / static_cast<double>(plan.n_reps));
        add("thinning_mean_vs_a_tau", mean, "|mean - a_tau| <= " + fmt(bound),
            std::abs(mean - report.a_tau) <= bound);
        const auto fit_tau = with_context("fit a_tau", [&] { return fit_poisson(report.thinning, report.a_tau); });
        add("thinning_fit_a_tau", fit_tau.p_value, p_threshold, fit_tau.p_value >= plan.alpha);
        const auto fit_a = with_context("fit a", [&] { return fit_poisson(report.thinning, report.a); });
        add("thinning_fit_a", fit_a.p_value, p_threshold, fit_a.p_value >= plan.alpha);
    }

    if (plan.monte_carlo) {
        report.monte_carlo = with_context("monte carlo", [&] {
            return run_replications(domain, rule, plan.tau, plan.n_reps, Method::monte_carlo, root.child(2),
                                    plan.options);
        });
        const auto fit = with_context("fit monte carlo", [&] { return fit_poisson(report.monte_carlo, report.a_tau); });
        add("monte_carlo_fit_a_tau", fit.p_value, p_threshold, fit.p_value >= plan.alpha);
        const auto mc_counts = survivor_counts(report.monte_carlo);
        const auto two = two_sample_chi2(mc_counts, thin_counts);
        add("monte_carlo_vs_thinning", two.p_value, p_threshold, two.p_value >= plan.alpha);
    }

    with_context("sandwich", [&] {
        report.bounds = sandwich(evaluator, rule, plan.tau, plan.n_bands, plan.s_grid);
        report.pgf = empirical_pgf(thin_counts, plan.s_grid, root.child(3));
        for (std::size_t i = 0; i < report.bounds.size(); ++i) {
            const auto& b = report.bounds[i];
            const auto& p = report.pgf[i];
            const double lo = b.lower - 3.0 * p.std_err, hi = b.upper + 3.0 * p.std_err;
            add("sandwich_s=" + fmt(b.s) + (b.approximate ? " (approx)" : ""), p.value,
                "[" + fmt(lo) + ", " + fmt(hi) + "]", p.value >= lo && p.value <= hi);
        }
        const auto coarse = sandwich(evaluator, rule, plan.tau, 10, plan.s_grid);
        const auto fine = sandwich(evaluator, rule, plan.tau, 40, plan.s_grid);
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < coarse.size(); ++i)
            worst = std::max(worst, (fine[i].upper - fine[i].lower) - (coarse[i].upper - coarse[i].lower));
        add("sandwich_refinement_40_vs_10", worst, "width(40) - width(10) <= 0", worst <= 0.0);
        return 0;
    });

    report.convergence = with_context("convergence", [&] {
        return convergence_table(basis, nu, plan.tau_grid, t_min);
    });
    if (nu.is_lebesgue() && report.convergence.rows.size() >= 2) {
        const auto& c = report.convergence;
        add("convergence_monotone", c.rows.back().abs_gap, "|a_tau - a| non-increasing", c.monotone);
        double worst = 0.0;
        for (std::size_t i = 0; i < c.ratios.size(); ++i)
            worst = std::max(worst, std::abs(c.ratios[i] / c.predicted[i] - 1.0));
        add("convergence_rate", worst, "|ratio/predicted - 1| <= 0.2", c.rate_ok);
    }
    return report;
}

}  // namespace survlab
