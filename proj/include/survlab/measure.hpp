#pragma once

#include <functional>
#include <string>

#include "survlab/geometry.hpp"

namespace survlab {

using ScalarField = std::function<double(const Point&)>;

// Finite base measure nu on Q: either a (weighted) Lebesgue measure or an
// absolutely continuous measure with a bounded density.
//
// Integrals against nu use tensor Gauss-Legendre (64 nodes per axis) on the
// interval and box, and 128-node radial Gauss-Legendre times a 128-point
// trapezoid in angle on the disk. Every integral is repeated at half
// resolution; a relative disagreement above 1e-6 raises AccuracyError.
class MeasureSpec {
  public:
    static MeasureSpec lebesgue(DomainSpec domain, double weight = 1.0);
    static MeasureSpec with_density(DomainSpec domain, ScalarField density, double sup_bound,
                                    std::string name = "density");

    bool is_lebesgue() const noexcept { return !density_; }
    // Constant density of a Lebesgue measure (0 for the zero measure).
    double weight() const noexcept { return weight_; }
    double sup_bound() const noexcept { return sup_bound_; }
    double total() const noexcept { return total_; }
    const DomainSpec& domain() const noexcept { return domain_; }
    const std::string& name() const noexcept { return name_; }

    double density_at(const Point& x) const;

    // int_Q f d(nu)
    double integrate(const ScalarField& f) const;
    // int over {r_lo < |x| <= r_hi} of f d(nu); disk only.
    double integrate_annulus(double r_lo, double r_hi, const ScalarField& f) const;
    // int over {a < x <= b} of f d(nu); interval only.
    double integrate_segment(double a, double b, const ScalarField& f) const;

    double mass_annulus(double r_lo, double r_hi) const;
    double mass_segment(double a, double b) const;

  private:
    MeasureSpec(DomainSpec domain, double weight, ScalarField density, double sup_bound,
                std::string name);

    double integrate_at(const ScalarField& f, std::size_t nodes) const;

    DomainSpec domain_;
    double weight_ = 1.0;
    ScalarField density_;
    double sup_bound_ = 1.0;
    double total_ = 0.0;
    std::string name_;
};

}  // namespace survlab
