#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "survlab/geometry.hpp"
#include "survlab/measure.hpp"
#include "survlab/rng.hpp"
#include "survlab/spectral.hpp"

namespace survlab {

// Intensity schedule m(., tau) = nu(.) * factor(tau) with g(tau) = exp(-tau lambda1 / 2).
//   exact:      factor = 1 / g(tau), so m(B, tau) g(tau) = nu(B) for every tau.
//   slow_limit: factor = (1 + 1/tau) / g(tau), which satisfies the hypothesis
//               only in the limit tau -> infinity.
class ScalingRule {
  public:
    enum class Schedule { exact, slow_limit };

    ScalingRule(MeasureSpec nu, double lambda1, Schedule schedule = Schedule::exact);

    const MeasureSpec& measure() const noexcept { return nu_; }
    double lambda1() const noexcept { return lambda1_; }
    Schedule schedule() const noexcept { return schedule_; }

    double g(double tau) const;
    double factor(double tau) const;
    // m(B, tau) for a set with nu(B) = nu_mass.
    double intensity(double nu_mass, double tau) const { return nu_mass * factor(tau); }
    // m(Q, tau)
    double total_intensity(double tau) const { return intensity(nu_.total(), tau); }

  private:
    MeasureSpec nu_;
    double lambda1_;
    Schedule schedule_;
};

const char* to_string(ScalingRule::Schedule schedule) noexcept;

// Exact Poisson variate: sequential-search inversion for mean < 50, otherwise
// transformed rejection with squeeze (PTRS).
std::uint64_t sample_poisson(double mean, RandomStream& rng);

// n i.i.d. points with density nu / nu(Q). Lebesgue measures use inversion
// (per axis on intervals and boxes, r = r0 sqrt(U) on the disk); densities use
// rejection against sup_bound and raise EfficiencyError if the acceptance rate
// falls below 1e-3.
std::vector<Point> sample_positions(const MeasureSpec& nu, std::size_t n, RandomStream& rng);

// Poisson configuration with intensity m(., tau); deterministic given the seed.
std::vector<Point> sample_configuration(const ScalingRule& rule, double tau, RngSeed seed);

// One band of a partition of Q. Level-set bands are {lo < F(x) <= hi}; radial
// bands are {lo < |x| <= hi}. Points with F(x) = 0 (or |x| = 0) go to band 0.
struct BandRegion {
    enum class Kind { level_set, annulus };
    Kind kind = Kind::level_set;
    std::size_t k = 0;
    std::size_t n = 0;
    double lo = 0.0;
    double hi = 0.0;
};

class BandPartition {
  public:
    // B_k = {M k / n < F <= M (k + 1) / n}, M = sup F.
    static BandPartition level_sets(LimitShape shape, std::size_t n);
    // Disk only: {r0 k / n < |x| <= r0 (k + 1) / n}.
    static BandPartition radial_annuli(const DomainSpec& disk, std::size_t n);

    std::size_t size() const noexcept { return bands_.size(); }
    const BandRegion& operator[](std::size_t k) const { return bands_.at(k); }
    const std::vector<BandRegion>& bands() const noexcept { return bands_; }
    BandRegion::Kind kind() const noexcept { return kind_; }
    const std::optional<LimitShape>& shape() const noexcept { return shape_; }

    std::size_t band_of(const Point& x) const;
    std::vector<std::size_t> counts(const std::vector<Point>& config) const;

    // Radii [inner, outer] bounding band k on the disk.
    std::pair<double, double> radii(std::size_t k) const;
    // Abscissae [a, b] of the left half of band k on the interval; the band is
    // (a, b] together with its mirror image in L/2.
    std::pair<double, double> half_segment(std::size_t k) const;

    // nu(B_k). Exact on the disk and interval; on boxes a midpoint-grid estimate
    // (mass_is_exact() is false).
    double mass(const MeasureSpec& nu, std::size_t k) const;
    bool mass_is_exact() const noexcept;

  private:
    BandPartition() = default;

    BandRegion::Kind kind_ = BandRegion::Kind::level_set;
    std::vector<BandRegion> bands_;
    std::optional<LimitShape> shape_;
    DomainKind domain_kind_ = DomainKind::disk;
    double radius_ = 0.0;
    double length_ = 0.0;
};

std::size_t count_in(const std::vector<Point>& config, const BandPartition& partition, std::size_t k);

}  // namespace survlab
