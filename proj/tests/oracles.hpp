#pragma once

// Independent reference implementations used only by the tests. None of these
// share code paths with the library: Bessel values come from the ascending
// series in 120-digit arithmetic, roots from bisection on that series, and the
// incomplete gamma from direct quadrature.

#include <cmath>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>>;

// J_order(x) by the ascending power series, order in {0, 1}.
inline Real bessel_series(int order, const Real& x) {
    const Real q = x * x / 4;
    Real term = (order == 0) ? Real(1) : x / 2;
    Real sum = term;
    for (int k = 1; k < 2000; ++k) {
        term *= -q / (Real(k) * (k + order));
        sum += term;
        if (k > 10 && abs(term) < Real("1e-60")) break;
    }
    return sum;
}

inline double bessel(int order, double x) {
    return static_cast<double>(bessel_series(order, Real(x)));
}

// m-th zero of J0 by bisection on the high-precision series.
inline double j0_root(int m) {
    const double pi = 3.14159265358979323846;
    Real lo = (m - 0.75) * pi, hi = (m + 0.25) * pi;
    Real flo = bessel_series(0, lo);
    for (int it = 0; it < 120; ++it) {
        Real mid = (lo + hi) / 2;
        Real fm = bessel_series(0, mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return static_cast<double>((lo + hi) / 2);
}

// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// P(a, x) = (1 / Gamma(a + 1)) * int_0^{x^a} exp(-w^{1/a}) dw  (substitution t = w^{1/a}).
inline double reg_lower_gamma(double a, double x) {
    const double upper = std::pow(x, a);
    const double integral =
        simpson([a](double w) { return std::exp(-std::pow(w, 1.0 / a)); }, 0.0, upper, 200000);
    return integral / std::tgamma(a + 1.0);
}

}  // namespace oracle
