#pragma once

#include <cstddef>
#include <vector>

namespace survlab {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t n);

// Integrate f over [a, b] with the given rule.
template <class F>
double integrate_segment(const GaussLegendreRule& rule, double a, double b, F&& f) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

}  // namespace survlab
