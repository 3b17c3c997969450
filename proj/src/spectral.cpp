#include "survlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <string>

#include "survlab/errors.hpp"
#include "survlab/specfun.hpp"

namespace survlab {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr std::size_t kMaxModes = 1'000'000;
// Disk modes beyond this index use the asymptotic majorant instead of exact roots.
constexpr std::size_t kDiskExactMajorant = 500;

// |c_k| * sup|f_k| for a one-dimensional sine mode k on [0, L].
double sine_weight(int k) { return (k % 2) ? 4.0 / (k * kPi) : 0.0; }

double sine_coefficient(int k, double length) {
    return (k % 2) ? std::sqrt(2.0 * length) * 2.0 / (k * kPi) : 0.0;
}

// Enumerates the modes of a domain in non-decreasing eigenvalue order.
class ModeSequence {
  public:
    explicit ModeSequence(const DomainSpec& domain) : domain_(domain) {
        if (domain_.kind() == DomainKind::box) {
            std::vector<int> first(domain_.dim(), 1);
            push(first);
        }
    }

    Mode next() {
        Mode m;
        switch (domain_.kind()) {
            case DomainKind::interval: m = interval_mode(static_cast<int>(++count_)); break;
            case DomainKind::disk: m = disk_mode(static_cast<int>(++count_)); break;
            case DomainKind::box: m = box_mode(); ++count_; break;
        }
        if (count_ == 1 || m.lambda > last_lambda_ * (1.0 + 1e-12)) {
            ++j_;
            slot_ = 1;
        } else {
            ++slot_;
        }
        last_lambda_ = m.lambda;
        m.j = j_;
        m.slot = slot_;
        return m;
    }

  private:
    struct Candidate {
        double lambda;
        std::vector<int> wave;
        bool operator>(const Candidate& o) const {
            if (lambda != o.lambda) return lambda > o.lambda;
            return wave > o.wave;
        }
    };

    double box_lambda(const std::vector<int>& wave) const {
        double lam = 0.0;
        for (std::size_t i = 0; i < wave.size(); ++i) {
            const double k = wave[i] * kPi / domain_.lengths()[i];
            lam += domain_.sigma()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) * k * k;
        }
        return lam;
    }

    void push(const std::vector<int>& wave) {
        if (seen_.insert(wave).second) heap_.push({box_lambda(wave), wave});
    }

    Mode interval_mode(int k) const {
        const double length = domain_.lengths()[0];
        const double sigma2 = domain_.sigma()(0, 0);
        Mode m;
        m.kind = DomainKind::interval;
        m.dim = 1;
        m.wave[0] = k;
        m.lengths[0] = length;
        const double kk = k * kPi / length;
        m.lambda = sigma2 * kk * kk;
        m.c = sine_coefficient(k, length);
        m.sup_abs = std::sqrt(2.0 / length);
        return m;
    }

    Mode box_mode() {
        Candidate top = heap_.top();
        heap_.pop();
        for (std::size_t i = 0; i < top.wave.size(); ++i) {
            auto w = top.wave;
            ++w[i];
            push(w);
        }
        Mode m;
        m.kind = DomainKind::box;
        m.dim = top.wave.size();
        m.lambda = top.lambda;
        m.c = 1.0;
        m.sup_abs = 1.0;
        for (std::size_t i = 0; i < m.dim; ++i) {
            const double length = domain_.lengths()[i];
            m.wave[i] = top.wave[i];
            m.lengths[i] = length;
            m.c *= sine_coefficient(top.wave[i], length);
            m.sup_abs *= std::sqrt(2.0 / length);
        }
        return m;
    }

    Mode disk_mode(int k) const {
        const double r0 = domain_.radius();
        const double sigma2 = domain_.sigma()(0, 0);
        const double mu = specfun::bessel_j0_root(k);
        const double j1 = specfun::bessel_j1(mu);
        Mode m;
        m.kind = DomainKind::disk;
        m.dim = 2;
        m.radius = r0;
        m.root = mu;
        m.norm = 1.0 / (std::sqrt(kPi) * r0 * std::abs(j1));
        m.lambda = sigma2 * (mu / r0) * (mu / r0);
        m.c = std::copysign(2.0 * std::sqrt(kPi) * r0 / mu, j1);
        m.sup_abs = m.norm;  // |J0| <= 1 with equality at the centre
        return m;
    }

    const DomainSpec& domain_;
    std::size_t count_ = 0;
    std::size_t j_ = 0;
    std::size_t slot_ = 0;
    double last_lambda_ = 0.0;
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap_;
    std::set<std::vector<int>> seen_;
};

struct MajorantTerm {
    double lambda;
    double weight;  // |c| sup|f|
};

double majorant_ceiling(const DomainSpec& domain) {
    switch (domain.kind()) {
        case DomainKind::interval: return 4.0 / kPi;
        case DomainKind::box: return std::pow(4.0 / kPi, static_cast<double>(domain.dim()));
        case DomainKind::disk: return 1.61;  // 2 / (mu_1 J1(mu_1)) = 1.60197...
    }
    return 1.0;
}

// Majorant terms |c_k| sup|f_k| for k = 1, 2, ... until ceiling * exp(-t lambda / 2)
// drops below `threshold`. Eigenvalues grow at least like k^(2/d), so the
// unlisted remainder is a small multiple of the threshold.
std::vector<MajorantTerm> majorant_terms(const DomainSpec& domain, double t, double threshold) {
    require_closed_form_basis(domain);
    const double ceiling = majorant_ceiling(domain);
    const double lambda_cut = 2.0 * std::log(ceiling / threshold) / t;
    std::vector<MajorantTerm> terms;

    if (domain.kind() == DomainKind::disk) {
        const double r0 = domain.radius();
        const double sigma2 = domain.sigma()(0, 0);
        for (std::size_t k = 1;; ++k) {
            if (k > kMaxModes + 1) throw CapacityError("truncation order exceeds 1e6 modes");
            MajorantTerm term{};
            if (k <= kDiskExactMajorant) {
                const double mu = specfun::bessel_j0_root(static_cast<int>(k));
                term.lambda = sigma2 * (mu / r0) * (mu / r0);
                term.weight = 2.0 / (mu * std::abs(specfun::bessel_j1(mu)));
            } else {
                // mu_k > (k - 1/4) pi and mu |J1(mu)|^2 -> 2/pi from above, so
                // sqrt(2 pi / mu) bounds 2 / (mu |J1(mu)|).
                const double beta = (static_cast<double>(k) - 0.25) * kPi;
                term.lambda = sigma2 * (beta / r0) * (beta / r0);
                term.weight = std::sqrt(2.0 * kPi / beta);
            }
            terms.push_back(term);
            if (term.lambda > lambda_cut) break;
        }
        return terms;
    }

    ModeSequence seq(domain);
    for (std::size_t k = 1;; ++k) {
        if (k > kMaxModes + 1) throw CapacityError("truncation order exceeds 1e6 modes");
        const Mode m = seq.next();
        double weight = 1.0;
        for (std::size_t i = 0; i < m.dim; ++i) weight *= sine_weight(m.wave[i]);
        terms.push_back({m.lambda, weight});
        if (m.lambda > lambda_cut) break;
    }
    return terms;
}

double tail_sum(std::span<const MajorantTerm> terms, double t) {
    double s = 0.0;
    // smallest terms first
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) s += it->weight * std::exp(-0.5 * t * it->lambda);
    return s;
}

double checked_threshold(double tol) {
    return std::max(1e-6 * tol, 1e-300);
}

}  // namespace

// ---------------------------------------------------------------------------

double Mode::operator()(const Point& x) const {
    if (kind == DomainKind::disk) {
        const double r = std::hypot(x[0], x[1]);
        return norm * specfun::bessel_j0(root * r / radius);
    }
    double v = 1.0;
    for (std::size_t i = 0; i < dim; ++i) {
        v *= std::sqrt(2.0 / lengths[i]) * std::sin(wave[i] * kPi * x[i] / lengths[i]);
    }
    return v;
}

void require_closed_form_basis(const DomainSpec& domain) {
    switch (domain.kind()) {
        case DomainKind::interval:
        case DomainKind::box:
            if (!domain.sigma_is_diagonal()) {
                throw UnsupportedDomainError(std::string(to_string(domain.kind())) +
                                             ": closed-form eigenbasis requires a diagonal sigma");
            }
            return;
        case DomainKind::disk:
            if (!domain.sigma_is_isotropic()) {
                throw UnsupportedDomainError("disk: closed-form eigenbasis requires isotropic sigma = s^2 I");
            }
            return;
    }
}

std::vector<Mode> build_basis(const DomainSpec& domain, std::size_t n_modes) {
    require_closed_form_basis(domain);
    if (n_modes == 0) throw DomainError("build_basis: n_modes must be >= 1");
    if (n_modes > kMaxModes) throw CapacityError("build_basis: more than 1e6 modes requested");
    ModeSequence seq(domain);
    std::vector<Mode> modes;
    modes.reserve(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) modes.push_back(seq.next());
    return modes;
}

double series_tail_bound(const DomainSpec& domain, std::size_t n_modes, double t) {
    if (!(t > 0.0)) throw DomainError("series_tail_bound: t must be positive");
    const auto terms = majorant_terms(domain, t, 1e-300);
    if (n_modes >= terms.size()) return 0.0;
    return tail_sum(std::span(terms).subspan(n_modes), t);
}

std::size_t truncation_order(const DomainSpec& domain, double t_min, double tol) {
    if (!(t_min > 0.0) || !std::isfinite(t_min)) throw DomainError("truncation_order: t_min must be positive");
    if (!(tol > 0.0)) throw DomainError("truncation_order: tol must be positive");
    const auto terms = majorant_terms(domain, t_min, checked_threshold(tol));
    double suffix = 0.0;
    std::size_t order = terms.size();
    for (std::size_t k = terms.size(); k-- > 0;) {
        suffix += terms[k].weight * std::exp(-0.5 * t_min * terms[k].lambda);
        if (suffix > tol) break;
        order = k;  // dropping terms k.. stays within tol
    }
    order = std::max<std::size_t>(order, 1);
    if (order > kMaxModes) throw CapacityError("truncation order exceeds 1e6 modes");
    return order;
}

// ---------------------------------------------------------------------------

SurvivalEvaluator::SurvivalEvaluator(DomainSpec domain, std::vector<Mode> modes, double t_min, double tol)
    : domain_(std::move(domain)), modes_(std::move(modes)), t_min_(t_min), tol_(tol) {
    if (modes_.empty()) throw DomainError("SurvivalEvaluator needs at least one mode");
    if (!(t_min_ > 0.0) || !std::isfinite(t_min_)) throw DomainError("SurvivalEvaluator: t_min must be positive");
    if (!(tol_ > 0.0)) throw DomainError("SurvivalEvaluator: tol must be positive");
    const auto terms = majorant_terms(domain_, t_min_, checked_threshold(tol_));
    for (std::size_t k = modes_.size(); k < terms.size(); ++k) tail_.push_back({terms[k].lambda, terms[k].weight});
}

SurvivalEvaluator SurvivalEvaluator::certified(const DomainSpec& domain, double t_min, double tol) {
    return SurvivalEvaluator(domain, build_basis(domain, truncation_order(domain, t_min, tol)), t_min, tol);
}

SurvivalEvaluator SurvivalEvaluator::certified(const DomainSpec& domain) {
    return certified(domain, domain.default_t_min());
}

double SurvivalEvaluator::tail_bound(double t) const {
    if (!(t >= t_min_)) throw TruncationError("tail_bound: t below t_min");
    double s = 0.0;
    for (auto it = tail_.rbegin(); it != tail_.rend(); ++it) s += it->weight * std::exp(-0.5 * t * it->lambda);
    return s;
}

double SurvivalEvaluator::series(double t, const Point& x) const {
    double s = 0.0;
    for (const Mode& m : modes_) {
        if (m.c == 0.0) continue;
        s += std::exp(-0.5 * t * m.lambda) * m.c * m(x);
    }
    return s;
}

double SurvivalEvaluator::survival(double t, const Point& x) const {
    if (!domain_.in_closure(x)) throw DomainError("survival: position outside the closure of Q");
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("survival: time must be finite and non-negative");
    if (!domain_.contains(x)) return 0.0;
    if (t == 0.0) return 1.0;
    if (t < t_min_) {
        throw TruncationError("survival: t = " + std::to_string(t) + " is below t_min = " + std::to_string(t_min_));
    }
    const double raw = series(t, x);
    const double band = std::max(tol_, tail_bound(t)) + 1e-12;
    if (raw < -band || raw > 1.0 + band) {
        throw AccuracyError("survival: truncated series left [-band, 1 + band]", raw);
    }
    return std::clamp(raw, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

LimitShape::LimitShape(std::vector<Mode> ground) : ground_(std::move(ground)) {
    if (ground_.empty()) throw DomainError("LimitShape needs the ground modes");
    kind_ = ground_.front().kind;
    Point centre(ground_.front().dim);
    if (kind_ != DomainKind::disk) {
        for (std::size_t i = 0; i < centre.size(); ++i) centre[i] = 0.5 * ground_.front().lengths[i];
    }
    sup_ = (*this)(centre);
}

double LimitShape::operator()(const Point& x) const {
    double s = 0.0;
    for (const Mode& m : ground_) s += m.c * m(x);
    return s;
}

double LimitShape::level_radius(double level) const {
    if (kind_ != DomainKind::disk) throw DomainError("level_radius is defined on the disk only");
    if (!(level >= 0.0 && level <= sup_ * (1.0 + 1e-14))) throw DomainError("level outside [0, sup F]");
    const Mode& g = ground_.front();
    const double z = specfun::bessel_j0_inverse_on_main_lobe(std::min(level / sup_, 1.0));
    return std::min(g.radius, z * g.radius / g.root);
}

double LimitShape::level_abscissa(double level) const {
    if (kind_ != DomainKind::interval) throw DomainError("level_abscissa is defined on the interval only");
    if (!(level >= 0.0 && level <= sup_ * (1.0 + 1e-14))) throw DomainError("level outside [0, sup F]");
    const double length = ground_.front().lengths[0];
    return length / kPi * std::asin(std::min(level / sup_, 1.0));
}

LimitShape limit_shape(std::span<const Mode> basis) {
    if (basis.empty()) throw DomainError("limit_shape: empty basis");
    std::vector<Mode> ground;
    for (const Mode& m : basis)
        if (m.j == 1) ground.push_back(m);
    LimitShape shape(std::move(ground));

    // F >= 0 on Q, checked on a deterministic sample grid of ~1000 points.
    const Mode& g = basis.front();
    double min_value = std::numeric_limits<double>::infinity();
    if (g.kind == DomainKind::disk) {
        for (int i = 0; i <= 40; ++i)
            for (int k = 0; k < 25; ++k) {
                const double r = g.radius * i / 40.0;
                const double th = 2.0 * kPi * k / 25.0;
                min_value = std::min(min_value, shape(Point{r * std::cos(th), r * std::sin(th)}));
            }
    } else {
        const std::size_t per_axis =
            std::max<std::size_t>(2, static_cast<std::size_t>(std::pow(1000.0, 1.0 / static_cast<double>(g.dim))));
        std::vector<std::size_t> idx(g.dim, 0);
        Point x(g.dim);
        while (true) {
            for (std::size_t i = 0; i < g.dim; ++i)
                x[i] = g.lengths[i] * static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1);
            min_value = std::min(min_value, shape(x));
            std::size_t axis = 0;
            while (axis < g.dim && ++idx[axis] == per_axis) idx[axis++] = 0;
            if (axis == g.dim) break;
        }
    }
    if (min_value < -1e-12 * std::max(1.0, shape.sup())) {
        throw AccuracyError("limit_shape: F is negative somewhere on Q", min_value);
    }
    return shape;
}

namespace {

void check_same_domain(std::span<const Mode> basis, const MeasureSpec& nu) {
    if (basis.empty()) throw DomainError("empty basis");
    if (basis.front().kind != nu.domain().kind()) throw DomainError("basis and measure live on different domains");
}

}  // namespace

double poisson_parameter(std::span<const Mode> basis, const MeasureSpec& nu) {
    check_same_domain(basis, nu);
    if (nu.is_lebesgue()) {
        double s = 0.0;
        for (const Mode& m : basis)
            if (m.j == 1) s += m.c * m.c;
        return nu.weight() * s;
    }
    const LimitShape shape = limit_shape(basis);
    return nu.integrate([&](const Point& x) { return shape(x); });
}

double poisson_parameter_at(std::span<const Mode> basis, const MeasureSpec& nu, double tau) {
    check_same_domain(basis, nu);
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("poisson_parameter_at: tau must be >= 0");
    const double lambda1 = basis.front().lambda;
    if (nu.is_lebesgue()) {
        double s = 0.0;
        for (auto it = basis.rbegin(); it != basis.rend(); ++it)
            s += std::exp(-0.5 * tau * (it->lambda - lambda1)) * it->c * it->c;
        return nu.weight() * s;
    }
    return nu.integrate([&](const Point& x) {
        double s = 0.0;
        for (const Mode& m : basis) {
            if (m.c == 0.0) continue;
            s += std::exp(-0.5 * tau * (m.lambda - lambda1)) * m.c * m(x);
        }
        return s;
    });
}

double first_contributing_gap(std::span<const Mode> basis) {
    if (basis.empty()) return 0.0;
    const double lambda1 = basis.front().lambda;
    for (const Mode& m : basis)
        if (m.j > 1 && m.c != 0.0) return m.lambda - lambda1;
    return 0.0;
}

}  // namespace survlab
