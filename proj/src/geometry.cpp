#include "survlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "survlab/errors.hpp"

namespace survlab {

Point::Point(std::size_t dim) : dim_(dim) {
    if (dim == 0 || dim > kMaxDim) {
        throw DomainError("Point: dimension must be in 1.." + std::to_string(kMaxDim));
    }
}

Point::Point(std::initializer_list<double> coords)
    : Point(std::span<const double>(coords.begin(), coords.size())) {}

Point::Point(std::span<const double> coords) : Point(coords.size()) {
    std::copy(coords.begin(), coords.end(), c_.begin());
}

double Point::norm() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += c_[i] * c_[i];
    return std::sqrt(s);
}

bool operator==(const Point& a, const Point& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    return std::equal(a.c_.begin(), a.c_.begin() + a.dim_, b.c_.begin());
}

const char* to_string(DomainKind kind) noexcept {
    switch (kind) {
        case DomainKind::interval: return "interval";
        case DomainKind::box: return "box";
        case DomainKind::disk: return "disk";
    }
    return "unknown";
}

namespace {

double checked_min_eigenvalue(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() == 0 || sigma.rows() != sigma.cols()) {
        throw DomainError("sigma must be a non-empty square matrix");
    }
    if (static_cast<std::size_t>(sigma.rows()) > kMaxDim) {
        throw DomainError("dimension exceeds " + std::to_string(kMaxDim));
    }
    if (!sigma.allFinite()) throw DomainError("sigma has non-finite entries");
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw DomainError("sigma must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma, Eigen::EigenvaluesOnly);
    const double mu = solver.eigenvalues().minCoeff();
    if (!(mu > 0.0)) {
        throw DomainError("sigma must be positive definite (smallest eigenvalue " +
                          std::to_string(mu) + ")");
    }
    return mu;
}

void require_positive(double v, const char* what) {
    if (!std::isfinite(v) || !(v > 0.0)) {
        throw DomainError(std::string(what) + " must be finite and positive");
    }
}

}  // namespace

DomainSpec::DomainSpec(DomainKind kind, std::vector<double> lengths, double radius,
                       Eigen::MatrixXd sigma)
    : kind_(kind), lengths_(std::move(lengths)), radius_(radius), sigma_(std::move(sigma)) {
    ellipticity_ = checked_min_eigenvalue(sigma_);
}

DomainSpec DomainSpec::interval(double length, double sigma2) {
    require_positive(length, "interval length");
    require_positive(sigma2, "sigma2");
    return DomainSpec(DomainKind::interval, {length}, 0.0, Eigen::MatrixXd::Constant(1, 1, sigma2));
}

DomainSpec DomainSpec::box(std::vector<double> lengths, const Eigen::MatrixXd& sigma) {
    if (lengths.empty()) throw DomainError("box needs at least one side length");
    for (double l : lengths) require_positive(l, "box side length");
    if (static_cast<std::size_t>(sigma.rows()) != lengths.size()) {
        throw DomainError("box: sigma dimension does not match number of side lengths");
    }
    return DomainSpec(DomainKind::box, std::move(lengths), 0.0, sigma);
}

DomainSpec DomainSpec::disk(double radius, double sigma2) {
    require_positive(sigma2, "sigma2");
    return disk(radius, Eigen::MatrixXd::Identity(2, 2) * sigma2);
}

DomainSpec DomainSpec::disk(double radius, const Eigen::MatrixXd& sigma) {
    require_positive(radius, "disk radius");
    if (sigma.rows() != 2) throw DomainError("disk: sigma must be 2x2");
    return DomainSpec(DomainKind::disk, {}, radius, sigma);
}

bool DomainSpec::sigma_is_diagonal() const noexcept {
    const double scale = sigma_.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < sigma_.rows(); ++i)
        for (Eigen::Index j = 0; j < sigma_.cols(); ++j)
            if (i != j && std::abs(sigma_(i, j)) > 1e-14 * scale) return false;
    return true;
}

bool DomainSpec::sigma_is_isotropic() const noexcept {
    if (!sigma_is_diagonal()) return false;
    const double d0 = sigma_(0, 0);
    for (Eigen::Index i = 1; i < sigma_.rows(); ++i)
        if (std::abs(sigma_(i, i) - d0) > 1e-14 * d0) return false;
    return true;
}

double DomainSpec::max_diffusion() const noexcept { return sigma_.diagonal().maxCoeff(); }

bool DomainSpec::contains(const Point& x) const noexcept {
    if (x.size() != dim()) return false;
    if (kind_ == DomainKind::disk) return x[0] * x[0] + x[1] * x[1] < radius_ * radius_;
    for (std::size_t i = 0; i < lengths_.size(); ++i)
        if (!(x[i] > 0.0 && x[i] < lengths_[i])) return false;
    return true;
}

bool DomainSpec::in_closure(const Point& x) const noexcept {
    if (x.size() != dim()) return false;
    if (kind_ == DomainKind::disk) return x[0] * x[0] + x[1] * x[1] <= radius_ * radius_;
    for (std::size_t i = 0; i < lengths_.size(); ++i)
        if (!(x[i] >= 0.0 && x[i] <= lengths_[i])) return false;
    return true;
}

double DomainSpec::distance_to_boundary(const Point& x) const noexcept {
    if (kind_ == DomainKind::disk) return radius_ - x.norm();
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lengths_.size(); ++i)
        d = std::min({d, x[i], lengths_[i] - x[i]});
    return d;
}

double DomainSpec::diameter() const noexcept {
    if (kind_ == DomainKind::disk) return 2.0 * radius_;
    double s = 0.0;
    for (double l : lengths_) s += l * l;
    return std::sqrt(s);
}

double DomainSpec::volume() const noexcept {
    if (kind_ == DomainKind::disk) return M_PI * radius_ * radius_;
    return std::accumulate(lengths_.begin(), lengths_.end(), 1.0, std::multiplies<>());
}

Point DomainSpec::center() const {
    Point c(dim());
    if (kind_ != DomainKind::disk)
        for (std::size_t i = 0; i < lengths_.size(); ++i) c[i] = 0.5 * lengths_[i];
    return c;
}

double DomainSpec::default_t_min() const noexcept {
    const double diam = diameter();
    return 0.01 * diam * diam / max_diffusion();
}

std::string DomainSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind_);
    if (kind_ == DomainKind::disk) {
        os << "(r0=" << radius_ << ")";
    } else {
        os << "(L=";
        for (std::size_t i = 0; i < lengths_.size(); ++i) os << (i ? "x" : "") << lengths_[i];
        os << ")";
    }
    os << " sigma_diag=";
    for (Eigen::Index i = 0; i < sigma_.rows(); ++i) os << (i ? "," : "") << sigma_(i, i);
    return os.str();
}

}  // namespace survlab
