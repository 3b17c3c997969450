#include "survlab/measure.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "survlab/errors.hpp"
#include "survlab/quadrature.hpp"

namespace survlab {
namespace {

const GaussLegendreRule& rule(std::size_t n) {
    static const GaussLegendreRule r32 = gauss_legendre(32);
    static const GaussLegendreRule r64 = gauss_legendre(64);
    static const GaussLegendreRule r128 = gauss_legendre(128);
    switch (n) {
        case 32: return r32;
        case 64: return r64;
        case 128: return r128;
        default: throw DomainError("no cached Gauss-Legendre rule with " + std::to_string(n) + " nodes");
    }
}

constexpr std::size_t kAxisNodes = 64;
constexpr std::size_t kRadialNodes = 128;
constexpr double kRelTolerance = 1e-6;

double annulus_quadrature(double r_lo, double r_hi, std::size_t radial, std::size_t angular,
                          const ScalarField& g) {
    const auto& gl = rule(radial);
    const double dtheta = 2.0 * M_PI / static_cast<double>(angular);
    return integrate_segment(gl, r_lo, r_hi, [&](double r) {
        double s = 0.0;
        for (std::size_t k = 0; k < angular; ++k) {
            const double th = dtheta * static_cast<double>(k);
            s += g(Point{r * std::cos(th), r * std::sin(th)});
        }
        return s * dtheta * r;
    });
}

double box_quadrature(const std::vector<double>& lengths, std::size_t n, const ScalarField& g) {
    const auto& gl = rule(n);
    const std::size_t d = lengths.size();
    std::vector<std::size_t> idx(d, 0);
    Point x(d);
    double total = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double half = 0.5 * lengths[i];
            x[i] = half * (1.0 + gl.nodes[idx[i]]);
            w *= gl.weights[idx[i]] * half;
        }
        total += w * g(x);
        std::size_t axis = 0;
        while (axis < d && ++idx[axis] == n) idx[axis++] = 0;
        if (axis == d) break;
    }
    return total;
}

double checked(double fine, double coarse, const char* where) {
    const double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) > kRelTolerance * scale && std::abs(fine - coarse) > 1e-14) {
        throw AccuracyError(std::string("quadrature did not converge (") + where +
                                "): fine=" + std::to_string(fine) + " coarse=" + std::to_string(coarse),
                            fine);
    }
    return fine;
}

}  // namespace

MeasureSpec::MeasureSpec(DomainSpec domain, double weight, ScalarField density, double sup_bound,
                         std::string name)
    : domain_(std::move(domain)),
      weight_(weight),
      density_(std::move(density)),
      sup_bound_(sup_bound),
      name_(std::move(name)) {}

MeasureSpec MeasureSpec::lebesgue(DomainSpec domain, double weight) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw DomainError("Lebesgue weight must be finite and non-negative");
    }
    MeasureSpec m(std::move(domain), weight, {}, weight, weight == 0.0 ? "zero" : "lebesgue");
    m.total_ = weight * m.domain_.volume();
    return m;
}

MeasureSpec MeasureSpec::with_density(DomainSpec domain, ScalarField density, double sup_bound,
                                      std::string name) {
    if (!density) throw DomainError("density must be callable");
    if (!(sup_bound > 0.0) || !std::isfinite(sup_bound)) {
        throw DomainError("density sup_bound must be finite and positive");
    }
    MeasureSpec m(std::move(domain), 1.0, std::move(density), sup_bound, std::move(name));
    m.total_ = m.integrate([](const Point&) { return 1.0; });
    if (!(m.total_ < std::numeric_limits<double>::infinity())) {
        throw DomainError("density measure must have finite total mass");
    }
    return m;
}

double MeasureSpec::density_at(const Point& x) const {
    if (!density_) return weight_;
    const double v = density_(x);
    if (!(v >= 0.0)) throw DomainError("density is negative or NaN at a point of Q");
    if (v > sup_bound_ * (1.0 + 1e-12)) throw DomainError("density exceeds its declared sup_bound");
    return v;
}

double MeasureSpec::integrate_at(const ScalarField& f, std::size_t nodes) const {
    const ScalarField g = [&](const Point& x) { return f(x) * density_at(x); };
    switch (domain_.kind()) {
        case DomainKind::disk:
            return annulus_quadrature(0.0, domain_.radius(), nodes, nodes, g);
        case DomainKind::interval:
        case DomainKind::box:
            return box_quadrature(domain_.lengths(), nodes, g);
    }
    return 0.0;
}

double MeasureSpec::integrate(const ScalarField& f) const {
    if (is_lebesgue() && weight_ == 0.0) return 0.0;
    const std::size_t fine = domain_.kind() == DomainKind::disk ? kRadialNodes : kAxisNodes;
    return checked(integrate_at(f, fine), integrate_at(f, fine / 2), "integrate");
}

double MeasureSpec::integrate_annulus(double r_lo, double r_hi, const ScalarField& f) const {
    if (domain_.kind() != DomainKind::disk) throw DomainError("integrate_annulus needs a disk domain");
    if (!(0.0 <= r_lo && r_lo <= r_hi && r_hi <= domain_.radius() * (1.0 + 1e-15))) {
        throw DomainError("annulus radii must satisfy 0 <= r_lo <= r_hi <= r0");
    }
    if (r_lo == r_hi || (is_lebesgue() && weight_ == 0.0)) return 0.0;
    const ScalarField g = [&](const Point& x) { return f(x) * density_at(x); };
    return checked(annulus_quadrature(r_lo, r_hi, kRadialNodes, kRadialNodes, g),
                   annulus_quadrature(r_lo, r_hi, kRadialNodes / 2, kRadialNodes / 2, g),
                   "annulus");
}

double MeasureSpec::integrate_segment(double a, double b, const ScalarField& f) const {
    if (domain_.kind() != DomainKind::interval) throw DomainError("integrate_segment needs an interval domain");
    if (!(0.0 <= a && a <= b && b <= domain_.lengths()[0] * (1.0 + 1e-15))) {
        throw DomainError("segment must satisfy 0 <= a <= b <= L");
    }
    if (a == b || (is_lebesgue() && weight_ == 0.0)) return 0.0;
    const auto g = [&](double x) {
        const Point p{x};
        return f(p) * density_at(p);
    };
    return checked(survlab::integrate_segment(rule(kAxisNodes), a, b, g),
                   survlab::integrate_segment(rule(kAxisNodes / 2), a, b, g), "segment");
}

double MeasureSpec::mass_annulus(double r_lo, double r_hi) const {
    if (is_lebesgue()) {
        if (domain_.kind() != DomainKind::disk) throw DomainError("mass_annulus needs a disk domain");
        return weight_ * M_PI * (r_hi * r_hi - r_lo * r_lo);
    }
    return integrate_annulus(r_lo, r_hi, [](const Point&) { return 1.0; });
}

double MeasureSpec::mass_segment(double a, double b) const {
    if (is_lebesgue()) {
        if (domain_.kind() != DomainKind::interval) throw DomainError("mass_segment needs an interval domain");
        return weight_ * (b - a);
    }
    return integrate_segment(a, b, [](const Point&) { return 1.0; });
}

}  // namespace survlab
