#include "survlab/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "survlab/errors.hpp"

namespace survlab::specfun {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Below this argument the ascending series is summed in long double; its
// largest term is ~1e2 so cancellation stays below 1e-17.
constexpr double kSeriesCutoff = 8.0;

BesselPair series_j01(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double t0 = 1.0L, s0 = 1.0L;  // (-q)^k / (k!)^2
    long double t1 = 1.0L, s1 = 1.0L;  // (-q)^k / (k! (k+1)!)
    for (int k = 1; k < 80; ++k) {
        t0 *= -q / (static_cast<long double>(k) * k);
        t1 *= -q / (static_cast<long double>(k) * (k + 1));
        s0 += t0;
        s1 += t1;
        if (std::fabs(t0) < 1e-24L && std::fabs(t1) < 1e-24L) break;
    }
    return {static_cast<double>(s0), static_cast<double>(0.5L * x * s1)};
}

// Miller backward recurrence normalised by J0 + 2 sum J_{2k} = 1.
BesselPair miller_j01(double x) {
    const long double xl = x;
    int start = static_cast<int>(x + 30.0 + 10.0 * std::cbrt(x));
    start += start % 2;  // even
    long double next = 0.0L;        // v_{n+1}
    long double cur = 1e-30L;       // v_n
    long double norm = 2.0L * cur;  // start is even
    long double v1 = 0.0L;
    for (int n = start; n >= 1; --n) {
        const long double prev = (2.0L * n / xl) * cur - next;  // v_{n-1}
        next = cur;
        cur = prev;
        const int idx = n - 1;
        if (idx == 1) v1 = cur;
        if (idx > 0 && idx % 2 == 0) norm += 2.0L * cur;
        if (std::fabs(cur) > 1e300L) {
            cur *= 1e-300L;
            next *= 1e-300L;
            norm *= 1e-300L;
            v1 *= 1e-300L;
        }
    }
    norm += cur;
    return {static_cast<double>(cur / norm), static_cast<double>(v1 / norm)};
}

void check_argument(double x) {
    if (!std::isfinite(x)) throw DomainError("Bessel argument must be finite");
    if (x < 0.0) throw DomainError("Bessel argument must be non-negative");
}

}  // namespace

BesselPair bessel_j01(double x) {
    check_argument(x);
    if (x < kSeriesCutoff) return series_j01(x);
    return miller_j01(x);
}

double bessel_j0(double x) { return bessel_j01(x).j0; }

double bessel_j1(double x) { return bessel_j01(x).j1; }

double bessel_j(int order, double x) {
    if (order == 0) return bessel_j0(x);
    if (order == 1) return bessel_j1(x);
    throw DomainError("bessel_j: only orders 0 and 1 are supported");
}

double bessel_j0_root(int m) {
    if (m < 1) throw DomainError("bessel_j0_root: index must be >= 1, got " + std::to_string(m));
    double lo = (m - 0.75) * kPi;
    double hi = (m + 0.25) * kPi;
    double f_lo = bessel_j0(lo);
    if (f_lo * bessel_j0(hi) >= 0.0) {
        throw AccuracyError("bessel_j0_root: bracket has no sign change", 0.5 * (lo + hi));
    }
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = bessel_j0(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 30; ++it) {
        const BesselPair v = bessel_j01(r);
        const double step = v.j0 / v.j1;
        double next = r + step;
        if (next < lo || next > hi) next = 0.5 * (lo + hi);
        const bool done = std::abs(next - r) <= 4.0 * std::numeric_limits<double>::epsilon() * r;
        r = next;
        if (done) break;
    }
    return r;
}

BesselRootTable bessel_j0_roots(int count) {
    if (count < 0) throw DomainError("bessel_j0_roots: count must be non-negative");
    BesselRootTable table;
    table.roots.reserve(static_cast<std::size_t>(count));
    for (int m = 1; m <= count; ++m) table.roots.push_back(bessel_j0_root(m));
    return table;
}

double bessel_j0_inverse_on_main_lobe(double level) {
    if (!(level >= 0.0 && level <= 1.0)) {
        throw DomainError("bessel_j0_inverse_on_main_lobe: level must lie in [0, 1]");
    }
    const double root = bessel_j0_root(1);
    if (level == 0.0) return root;
    if (level == 1.0) return 0.0;
    double lo = 0.0, hi = root;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * root; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bessel_j0(mid) > level) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Incomplete gamma

namespace {

double log_gamma(double a) {
    int sign = 0;
    return ::lgamma_r(a, &sign);
}

void check_gamma_args(double shape, double x) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw DomainError("incomplete gamma: shape must be positive and finite");
    }
    if (!(x >= 0.0)) throw DomainError("incomplete gamma: x must be non-negative");
}

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 10000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Q(a, x) by the Lentz continued fraction; for x >= a + 1.
double gamma_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

double reg_lower_gamma(double shape, double x) {
    check_gamma_args(shape, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < shape + 1.0) return gamma_series(shape, x);
    return 1.0 - gamma_continued_fraction(shape, x);
}

double reg_upper_gamma(double shape, double x) {
    check_gamma_args(shape, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < shape + 1.0) return 1.0 - gamma_series(shape, x);
    return gamma_continued_fraction(shape, x);
}

double chi2_cdf(double dof, double x) { return reg_lower_gamma(0.5 * dof, 0.5 * x); }

double chi2_sf(double dof, double x) { return reg_upper_gamma(0.5 * dof, 0.5 * x); }

// ---------------------------------------------------------------------------
// Poisson

double log_factorial(std::uint64_t k) { return log_gamma(static_cast<double>(k) + 1.0); }

double poisson_log_pmf(double mean, std::uint64_t k) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw DomainError("Poisson mean must be finite and non-negative");
    }
    if (mean == 0.0) {
        return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(k) * std::log(mean) - mean - log_factorial(k);
}

double poisson_pmf(double mean, std::uint64_t k) { return std::exp(poisson_log_pmf(mean, k)); }

double poisson_cdf(double mean, std::uint64_t k) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw DomainError("Poisson mean must be finite and non-negative");
    }
    if (mean == 0.0) return 1.0;
    return reg_upper_gamma(static_cast<double>(k) + 1.0, mean);
}

}  // namespace survlab::specfun
