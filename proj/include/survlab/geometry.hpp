#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace survlab {

inline constexpr std::size_t kMaxDim = 8;

// Fixed-capacity point in R^d, d <= kMaxDim. Value type, no allocation.
class Point {
  public:
    Point() = default;
    explicit Point(std::size_t dim);
    Point(std::initializer_list<double> coords);
    explicit Point(std::span<const double> coords);

    std::size_t size() const noexcept { return dim_; }
    double& operator[](std::size_t i) noexcept { return c_[i]; }
    double operator[](std::size_t i) const noexcept { return c_[i]; }

    std::span<const double> coords() const noexcept { return {c_.data(), dim_}; }
    double norm() const noexcept;

    friend bool operator==(const Point& a, const Point& b) noexcept;

  private:
    std::array<double, kMaxDim> c_{};
    std::size_t dim_ = 0;
};

enum class DomainKind { interval, box, disk };

const char* to_string(DomainKind kind) noexcept;

// Bounded domain Q together with the diffusion matrix sigma = B^T B of the
// absorbed process. Any symmetric positive definite sigma is accepted here;
// whether a closed-form eigenbasis exists is decided by the spectral module.
class DomainSpec {
  public:
    static DomainSpec interval(double length, double sigma2);
    static DomainSpec box(std::vector<double> lengths, const Eigen::MatrixXd& sigma);
    static DomainSpec disk(double radius, double sigma2);
    static DomainSpec disk(double radius, const Eigen::MatrixXd& sigma);

    DomainKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(sigma_.rows()); }

    // Side lengths; interval has one entry. Empty for the disk.
    const std::vector<double>& lengths() const noexcept { return lengths_; }
    double radius() const noexcept { return radius_; }
    const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }

    // Smallest eigenvalue of sigma (the ellipticity constant).
    double ellipticity() const noexcept { return ellipticity_; }
    bool sigma_is_diagonal() const noexcept;
    bool sigma_is_isotropic() const noexcept;
    double max_diffusion() const noexcept;

    bool contains(const Point& x) const noexcept;   // open set Q
    bool in_closure(const Point& x) const noexcept;
    double distance_to_boundary(const Point& x) const noexcept;

    double diameter() const noexcept;
    double volume() const noexcept;
    Point center() const;

    // 0.01 * diam^2 / max diagonal entry of sigma.
    double default_t_min() const noexcept;

    std::string describe() const;

  private:
    DomainSpec(DomainKind kind, std::vector<double> lengths, double radius,
               Eigen::MatrixXd sigma);

    DomainKind kind_;
    std::vector<double> lengths_;
    double radius_ = 0.0;
    Eigen::MatrixXd sigma_;
    double ellipticity_ = 0.0;
};

}  // namespace survlab
