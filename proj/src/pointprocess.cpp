#include "survlab/pointprocess.hpp"

#include <algorithm>
#include <cmath>

#include "survlab/errors.hpp"
#include "survlab/specfun.hpp"

namespace survlab {
namespace {

constexpr double kMaxMean = 1e9;
constexpr double kMinAcceptance = 1e-3;
constexpr std::size_t kMinAttemptsForRate = 1000;

std::uint64_t poisson_inversion(double mean, RandomStream& rng) {
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    // The cap only guards against cdf stalling just below u through rounding.
    const double cap = mean + 40.0 * std::sqrt(mean) + 100.0;
    while (u > cdf && static_cast<double>(k) < cap) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS.
std::uint64_t poisson_ptrs(double mean, RandomStream& rng) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        const auto ki = static_cast<std::uint64_t>(k);
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - specfun::log_factorial(ki)) {
            return ki;
        }
    }
}

Point uniform_point(const DomainSpec& domain, RandomStream& rng) {
    if (domain.kind() == DomainKind::disk) {
        const double r = domain.radius() * std::sqrt(rng.uniform());
        const double th = 2.0 * M_PI * rng.uniform();
        return Point{r * std::cos(th), r * std::sin(th)};
    }
    Point x(domain.dim());
    for (std::size_t i = 0; i < domain.dim(); ++i) x[i] = domain.lengths()[i] * rng.uniform();
    return x;
}

}  // namespace

ScalingRule::ScalingRule(MeasureSpec nu, double lambda1, Schedule schedule)
    : nu_(std::move(nu)), lambda1_(lambda1), schedule_(schedule) {
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) throw DomainError("lambda1 must be finite and positive");
}

double ScalingRule::g(double tau) const {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau must be finite and non-negative");
    return std::exp(-0.5 * tau * lambda1_);
}

double ScalingRule::factor(double tau) const {
    const double inv_g = std::exp(0.5 * tau * lambda1_);
    if (!std::isfinite(inv_g) || !(tau >= 0.0)) throw DomainError("tau out of range for the scaling rule");
    switch (schedule_) {
        case Schedule::exact: return inv_g;
        case Schedule::slow_limit:
            if (!(tau > 0.0)) throw DomainError("slow_limit schedule needs tau > 0");
            return (1.0 + 1.0 / tau) * inv_g;
    }
    return inv_g;
}

const char* to_string(ScalingRule::Schedule schedule) noexcept {
    return schedule == ScalingRule::Schedule::exact ? "exact" : "slow_limit";
}

std::uint64_t sample_poisson(double mean, RandomStream& rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite and non-negative");
    if (mean > kMaxMean) throw CapacityError("Poisson mean exceeds 1e9");
    if (mean == 0.0) return 0;
    return mean < 50.0 ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

std::vector<Point> sample_positions(const MeasureSpec& nu, std::size_t n, RandomStream& rng) {
    std::vector<Point> out;
    out.reserve(n);
    const DomainSpec& domain = nu.domain();
    if (nu.is_lebesgue()) {
        for (std::size_t i = 0; i < n; ++i) out.push_back(uniform_point(domain, rng));
        return out;
    }
    std::size_t attempts = 0;
    while (out.size() < n) {
        const Point x = uniform_point(domain, rng);
        ++attempts;
        if (rng.uniform() * nu.sup_bound() < nu.density_at(x)) out.push_back(x);
        if (attempts >= kMinAttemptsForRate &&
            static_cast<double>(out.size()) < kMinAcceptance * static_cast<double>(attempts)) {
            throw EfficiencyError("rejection sampling acceptance below 1e-3 for density '" + nu.name() +
                                  "'; sup_bound is too loose");
        }
    }
    return out;
}

std::vector<Point> sample_configuration(const ScalingRule& rule, double tau, RngSeed seed) {
    RandomStream rng(seed);
    const double mean = rule.total_intensity(tau);
    const auto n = sample_poisson(mean, rng);
    return sample_positions(rule.measure(), static_cast<std::size_t>(n), rng);
}

BandPartition BandPartition::level_sets(LimitShape shape, std::size_t n) {
    if (n < 1) throw DomainError("a partition needs at least one band");
    BandPartition p;
    p.kind_ = BandRegion::Kind::level_set;
    p.domain_kind_ = shape.kind();
    const Mode& g = shape.ground_modes().front();
    p.radius_ = g.radius;
    p.length_ = g.lengths[0];
    const double m = shape.sup();
    for (std::size_t k = 0; k < n; ++k) {
        p.bands_.push_back({BandRegion::Kind::level_set, k, n, m * static_cast<double>(k) / static_cast<double>(n),
                            m * static_cast<double>(k + 1) / static_cast<double>(n)});
    }
    p.shape_.emplace(std::move(shape));
    return p;
}

BandPartition BandPartition::radial_annuli(const DomainSpec& disk, std::size_t n) {
    if (disk.kind() != DomainKind::disk) throw DomainError("radial annuli need a disk domain");
    if (n < 1) throw DomainError("a partition needs at least one band");
    BandPartition p;
    p.kind_ = BandRegion::Kind::annulus;
    p.domain_kind_ = DomainKind::disk;
    p.radius_ = disk.radius();
    for (std::size_t k = 0; k < n; ++k) {
        p.bands_.push_back({BandRegion::Kind::annulus, k, n,
                            disk.radius() * static_cast<double>(k) / static_cast<double>(n),
                            disk.radius() * static_cast<double>(k + 1) / static_cast<double>(n)});
    }
    return p;
}

std::size_t BandPartition::band_of(const Point& x) const {
    const double v = kind_ == BandRegion::Kind::annulus ? x.norm() : std::max(0.0, (*shape_)(x));
    const double top = bands_.back().hi;
    const std::size_t n = bands_.size();
    if (v <= 0.0) return 0;
    if (v >= top) return n - 1;
    auto k = static_cast<std::size_t>(std::ceil(v / top * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n) - 1;
    // Settle rounding at the cut points against the stored thresholds.
    while (k > 0 && v <= bands_[k].lo) --k;
    while (k + 1 < n && v > bands_[k].hi) ++k;
    return k;
}

std::vector<std::size_t> BandPartition::counts(const std::vector<Point>& config) const {
    std::vector<std::size_t> c(bands_.size(), 0);
    for (const Point& x : config) ++c[band_of(x)];
    return c;
}

std::pair<double, double> BandPartition::radii(std::size_t k) const {
    if (domain_kind_ != DomainKind::disk) throw DomainError("band radii are defined on the disk only");
    const BandRegion& b = bands_.at(k);
    if (kind_ == BandRegion::Kind::annulus) return {b.lo, b.hi};
    return {shape_->level_radius(b.hi), shape_->level_radius(b.lo)};
}

std::pair<double, double> BandPartition::half_segment(std::size_t k) const {
    if (domain_kind_ != DomainKind::interval || kind_ != BandRegion::Kind::level_set) {
        throw DomainError("band segments are defined for level sets on the interval only");
    }
    const BandRegion& b = bands_.at(k);
    return {shape_->level_abscissa(b.lo), shape_->level_abscissa(b.hi)};
}

bool BandPartition::mass_is_exact() const noexcept { return domain_kind_ != DomainKind::box; }

double BandPartition::mass(const MeasureSpec& nu, std::size_t k) const {
    if (domain_kind_ == DomainKind::disk) {
        const auto [r_in, r_out] = radii(k);
        return nu.mass_annulus(r_in, r_out);
    }
    if (domain_kind_ == DomainKind::interval) {
        const auto [a, b] = half_segment(k);
        return nu.mass_segment(a, b) + nu.mass_segment(length_ - b, length_ - a);
    }
    // Box: midpoint grid with about 1e6 cells.
    const DomainSpec& domain = nu.domain();
    const std::size_t d = domain.dim();
    const auto per_axis = static_cast<std::size_t>(std::floor(std::pow(1e6, 1.0 / static_cast<double>(d))));
    std::vector<std::size_t> idx(d, 0);
    double cell = 1.0;
    for (std::size_t i = 0; i < d; ++i) cell *= domain.lengths()[i] / static_cast<double>(per_axis);
    Point x(d);
    double total = 0.0;
    for (;;) {
        for (std::size_t i = 0; i < d; ++i)
            x[i] = (static_cast<double>(idx[i]) + 0.5) * domain.lengths()[i] / static_cast<double>(per_axis);
        if (band_of(x) == k) total += nu.density_at(x);
        std::size_t axis = 0;
        while (axis < d && ++idx[axis] == per_axis) idx[axis++] = 0;
        if (axis == d) break;
    }
    return total * cell;
}

std::size_t count_in(const std::vector<Point>& config, const BandPartition& partition, std::size_t k) {
    if (k >= partition.size()) throw DomainError("band index out of range");
    std::size_t c = 0;
    for (const Point& x : config) c += partition.band_of(x) == k ? 1 : 0;
    return c;
}

}  // namespace survlab
