#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "survlab/geometry.hpp"
#include "survlab/measure.hpp"

namespace survlab {

// One Dirichlet eigenpair of A = sum sigma_ij d^2/dx_i dx_j: A f = -lambda f,
// with f orthonormal in L2(Q) and c = int_Q f dx.
struct Mode {
    std::size_t j = 1;     // index of the distinct eigenvalue, from 1
    std::size_t slot = 1;  // multiplicity slot within eigenvalue j, from 1
    double lambda = 0.0;
    double c = 0.0;
    double sup_abs = 0.0;  // sup over Q of |f|

    DomainKind kind = DomainKind::interval;
    std::size_t dim = 1;
    std::array<int, kMaxDim> wave{};         // sine wave numbers (interval, box)
    std::array<double, kMaxDim> lengths{};   // side lengths (interval, box)
    double radius = 0.0;                     // disk
    double root = 0.0;                       // disk: zero of J0
    double norm = 0.0;                       // disk: normalisation of J0(root r / r0)

    double operator()(const Point& x) const;
};

// Throws UnsupportedDomainError unless the domain has a closed-form eigenbasis:
// diagonal sigma on intervals and boxes, isotropic sigma on the disk.
void require_closed_form_basis(const DomainSpec& domain);

// First n_modes eigenpairs in non-decreasing eigenvalue order. On the disk only
// radial modes are listed: angular modes have c = 0 and do not contribute to
// the survival probability, which is radial.
std::vector<Mode> build_basis(const DomainSpec& domain, std::size_t n_modes);

// Certified bound on sup_x |sum_{k > n_modes} c_k f_k(x) exp(-t lambda_k / 2)|,
// computed as sum_{k > n_modes} |c_k| sup|f_k| exp(-t lambda_k / 2).
double series_tail_bound(const DomainSpec& domain, std::size_t n_modes, double t);

// Smallest J with series_tail_bound(domain, J, t) <= tol for every t >= t_min.
// Throws CapacityError if J would exceed 1e6.
std::size_t truncation_order(const DomainSpec& domain, double t_min, double tol);

// Truncated eigen-series for the survival probability
//   u(t, x) = sum_k exp(-t lambda_k / 2) c_k f_k(x).
// Immutable after construction; safe for concurrent readers.
class SurvivalEvaluator {
  public:
    SurvivalEvaluator(DomainSpec domain, std::vector<Mode> modes, double t_min, double tol = 1e-10);

    // Modes chosen by truncation_order(domain, t_min, tol).
    static SurvivalEvaluator certified(const DomainSpec& domain, double t_min, double tol = 1e-10);
    static SurvivalEvaluator certified(const DomainSpec& domain);

    const DomainSpec& domain() const noexcept { return domain_; }
    const std::vector<Mode>& modes() const noexcept { return modes_; }
    double t_min() const noexcept { return t_min_; }
    double tolerance() const noexcept { return tol_; }

    // Bound on the dropped part of the series at time t >= t_min.
    double tail_bound(double t) const;

    // Unclamped truncated series.
    double series(double t, const Point& x) const;

    // Series clamped to [0, 1]. u(0, x) = 1 inside Q. Throws DomainError outside
    // the closure of Q, TruncationError for 0 < t < t_min and AccuracyError when
    // the series leaves [-band, 1 + band] with band = max(tol, tail_bound(t)).
    double survival(double t, const Point& x) const;

  private:
    struct TailTerm {
        double lambda;
        double weight;
    };

    DomainSpec domain_;
    std::vector<Mode> modes_;
    double t_min_;
    double tol_;
    std::vector<TailTerm> tail_;
};

// F(x) = sum over the ground eigenspace of c_1m f_1m(x).
class LimitShape {
  public:
    explicit LimitShape(std::vector<Mode> ground);

    double operator()(const Point& x) const;
    // M = sup_Q F, attained at the centre of the supported domains.
    double sup() const noexcept { return sup_; }
    DomainKind kind() const noexcept { return kind_; }
    const std::vector<Mode>& ground_modes() const noexcept { return ground_; }

    // Disk: radius r with F(r) = level, for level in [0, sup].
    double level_radius(double level) const;
    // Interval: abscissa x in [0, L/2] with F(x) = level, for level in [0, sup].
    double level_abscissa(double level) const;

  private:
    std::vector<Mode> ground_;
    DomainKind kind_;
    double sup_ = 0.0;
};

// F built from the j == 1 modes of the basis; F >= 0 is checked on a sample grid.
LimitShape limit_shape(std::span<const Mode> basis);

// a = int_Q F d(nu).
double poisson_parameter(std::span<const Mode> basis, const MeasureSpec& nu);

// a_tau = int_Q u(tau, x) nu(dx) / g(tau), g(tau) = exp(-tau lambda_1 / 2).
// For a Lebesgue measure this is the closed form
//   weight * sum_j exp(-tau (lambda_j - lambda_1) / 2) c_j^2.
double poisson_parameter_at(std::span<const Mode> basis, const MeasureSpec& nu, double tau);

// Smallest eigenvalue above lambda_1 whose mode has a non-zero coefficient c;
// it sets the exponential rate of a_tau -> a for Lebesgue nu. Returns 0 when
// the basis has no such mode.
double first_contributing_gap(std::span<const Mode> basis);

}  // namespace survlab
