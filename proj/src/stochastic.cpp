#include "survlab/stochastic.hpp"

#include <cmath>
#include <sstream>

#include "survlab/errors.hpp"
#include "survlab/parallel.hpp"

namespace survlab {
namespace {

// Exponent above which exp(-x) underflows to zero in double precision.
constexpr double kUnderflow = 745.2;

// Flattened per-path constants so the inner loop touches no heap memory.
struct Stepper {
    std::size_t d = 0;
    double load[kMaxDim][kMaxDim]{};  // load = B^T, increment = sqrt(h) * load * Z
    double var_face[kMaxDim]{};       // sigma_ii, per-axis face-normal variance
    DomainKind kind = DomainKind::interval;
    double lengths[kMaxDim]{};
    double radius = 0.0;
    Eigen::MatrixXd sigma;
    bool isotropic = true;
    double sigma_iso = 0.0;

    Stepper(const DomainSpec& domain, const PathConfig& cfg)
        : d(domain.dim()), kind(domain.kind()), radius(domain.radius()), sigma(domain.sigma()) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t k = 0; k < d; ++k) load[i][k] = cfg.b_matrix(k, i);
            var_face[i] = sigma(i, i);
        }
        for (std::size_t i = 0; i < domain.lengths().size(); ++i) lengths[i] = domain.lengths()[i];
        isotropic = domain.sigma_is_isotropic();
        sigma_iso = sigma(0, 0);
    }

    double disk_normal_variance(const double* x) const {
        if (isotropic) return sigma_iso;
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
        if (r == 0.0) return sigma_iso;
        const double n0 = x[0] / r, n1 = x[1] / r;
        return sigma(0, 0) * n0 * n0 + 2.0 * sigma(0, 1) * n0 * n1 + sigma(1, 1) * n1 * n1;
    }
};

bool fires(double d0, double d1, double variance, double h, RandomStream& rng) {
    const double e = 2.0 * d0 * d1 / (variance * h);
    if (e >= kUnderflow) return false;
    return rng.uniform() < std::exp(-e);
}

PathOutcome run(const Stepper& s, const PathConfig& cfg, const Point& x0, RandomStream& rng) {
    double x[kMaxDim], y[kMaxDim], z[kMaxDim];
    for (std::size_t i = 0; i < s.d; ++i) x[i] = x0[i];
    PathOutcome out;
    std::size_t k = 0;
    for (;;) {
        const double t0 = static_cast<double>(k) * cfg.dt;
        if (t0 >= cfg.t_end) break;
        const double t1 = std::min(t0 + cfg.dt, cfg.t_end);
        const double h = t1 - t0;
        const double sh = std::sqrt(h);
        for (std::size_t i = 0; i < s.d; ++i) z[i] = rng.normal();
        for (std::size_t i = 0; i < s.d; ++i) {
            double inc = 0.0;
            for (std::size_t j = 0; j < s.d; ++j) inc += s.load[i][j] * z[j];
            y[i] = x[i] + sh * inc;
        }
        ++k;
        bool absorbed = false;
        if (s.kind == DomainKind::disk) {
            const double r1 = std::sqrt(y[0] * y[0] + y[1] * y[1]);
            const double d1 = s.radius - r1;
            if (d1 <= 0.0) {
                absorbed = true;
            } else if (cfg.bridge_correction) {
                const double d0 = s.radius - std::sqrt(x[0] * x[0] + x[1] * x[1]);
                absorbed = fires(d0, d1, s.disk_normal_variance(y), h, rng);
            }
        } else {
            for (std::size_t i = 0; i < s.d && !absorbed; ++i) {
                if (y[i] <= 0.0 || y[i] >= s.lengths[i]) absorbed = true;
            }
            if (!absorbed && cfg.bridge_correction) {
                for (std::size_t i = 0; i < s.d && !absorbed; ++i) {
                    absorbed = fires(x[i], y[i], s.var_face[i], h, rng) ||
                               fires(s.lengths[i] - x[i], s.lengths[i] - y[i], s.var_face[i], h, rng);
                }
            }
        }
        if (absorbed || t1 >= cfg.t_end) {
            // Closed horizon: reaching the boundary exactly at t_end is absorption.
            out.survived = !absorbed;
            out.absorbed_at = absorbed ? t1 : 0.0;
            out.steps = k;
            return out;
        }
        for (std::size_t i = 0; i < s.d; ++i) x[i] = y[i];
    }
    out.survived = true;
    out.steps = k;
    return out;
}

void require_inside(const DomainSpec& domain, const Point& x0) {
    if (x0.size() != domain.dim() || !domain.contains(x0)) {
        throw DomainError("starting point must lie strictly inside the domain");
    }
}

}  // namespace

double crossing_probability(double d0, double d1, double variance, double dt) noexcept {
    if (d0 <= 0.0 || d1 <= 0.0) return 1.0;
    const double e = 2.0 * d0 * d1 / (variance * dt);
    return e >= kUnderflow ? 0.0 : std::exp(-e);
}

PathConfig PathConfig::for_domain(const DomainSpec& domain, double dt, double t_end, bool bridge) {
    const Eigen::LLT<Eigen::MatrixXd> llt(domain.sigma());
    if (llt.info() != Eigen::Success) throw DomainError("sigma is not positive definite");
    PathConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.bridge_correction = bridge;
    cfg.b_matrix = llt.matrixL().transpose();
    cfg.validate(domain);
    return cfg;
}

void PathConfig::validate(const DomainSpec& domain) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be finite and positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be finite and positive");
    if (dt > t_end) throw DomainError("dt must not exceed t_end");
    const auto d = static_cast<Eigen::Index>(domain.dim());
    if (b_matrix.rows() != d || b_matrix.cols() != d) {
        throw DomainError("noise matrix B must be " + std::to_string(d) + " x " + std::to_string(d));
    }
    const Eigen::MatrixXd diff = b_matrix.transpose() * b_matrix - domain.sigma();
    const double err = diff.cwiseAbs().maxCoeff();
    if (!(err <= 1e-12)) {
        std::ostringstream os;
        os << "B^T B differs from sigma by " << err << " (tolerance 1e-12)";
        throw DomainError(os.str());
    }
}

PathOutcome simulate_until_absorbed(const DomainSpec& domain, const PathConfig& cfg, const Point& x0,
                                    RandomStream& rng) {
    cfg.validate(domain);
    require_inside(domain, x0);
    return run(Stepper(domain, cfg), cfg, x0, rng);
}

PathOutcome simulate_until_absorbed(const DomainSpec& domain, const PathConfig& cfg, const Point& x0,
                                    RngSeed seed) {
    RandomStream rng(seed);
    return simulate_until_absorbed(domain, cfg, x0, rng);
}

SurvivalEstimate estimate_survival(const DomainSpec& domain, const PathConfig& cfg, const Point& x0,
                                   std::size_t n_paths, RngSeed seed, unsigned threads) {
    if (n_paths == 0) throw DomainError("n_paths must be positive");
    cfg.validate(domain);
    require_inside(domain, x0);
    const Stepper stepper(domain, cfg);
    const auto survived = parallel_map(n_paths, threads, [&](std::size_t i) -> unsigned char {
        RandomStream rng(seed.child(i));
        return run(stepper, cfg, x0, rng).survived ? 1 : 0;
    });
    SurvivalEstimate est;
    est.n_paths = n_paths;
    for (unsigned char s : survived) est.n_survived += s;
    est.p_hat = static_cast<double>(est.n_survived) / static_cast<double>(n_paths);
    est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n_paths));
    return est;
}

std::vector<BiasRow> bias_probe(const DomainSpec& domain, const Point& x0, double t_end,
                                const std::vector<double>& dt_grid, std::size_t n_paths, RngSeed seed,
                                bool bridge_correction, unsigned threads) {
    for (std::size_t k = 1; k < dt_grid.size(); ++k) {
        if (!(dt_grid[k] < dt_grid[k - 1])) throw DomainError("dt grid must be strictly decreasing");
    }
    std::vector<BiasRow> rows;
    rows.reserve(dt_grid.size());
    for (std::size_t k = 0; k < dt_grid.size(); ++k) {
        const auto cfg = PathConfig::for_domain(domain, dt_grid[k], t_end, bridge_correction);
        const auto est = estimate_survival(domain, cfg, x0, n_paths, seed.child(k), threads);
        rows.push_back({dt_grid[k], est.p_hat, est.std_err});
    }
    return rows;
}

}  // namespace survlab
