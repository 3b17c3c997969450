#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "survlab/experiment.hpp"
#include "survlab/geometry.hpp"
#include "survlab/measure.hpp"

namespace survlab {

struct DomainBlock {
    DomainKind kind = DomainKind::disk;
    double length = 0.0;          // interval
    std::vector<double> lengths;  // box
    double r0 = 0.0;              // disk
    std::optional<double> sigma2;                        // isotropic sigma = sigma2 * I
    std::optional<std::vector<std::vector<double>>> sigma;  // full matrix
    bool operator==(const DomainBlock&) const = default;
};

struct MeasureBlock {
    std::string base = "lebesgue";  // "lebesgue" | "density"
    double weight = 1.0;            // Lebesgue weight
    std::string density;            // density id for base = "density"
    bool operator==(const MeasureBlock&) const = default;
};

struct ScheduleBlock {
    std::optional<double> lambda1;
    std::string kind = "exact";  // "exact" | "slow_limit"
    bool operator==(const ScheduleBlock&) const = default;
};

struct SimulationBlock {
    double dt = 1e-4;
    std::uint64_t n_paths = 100000;
    std::uint64_t n_reps = 2000;
    bool bridge = true;
    bool monte_carlo = true;
    unsigned threads = 0;
    bool operator==(const SimulationBlock&) const = default;
};

struct AnalysisBlock {
    std::uint64_t n_bands = 20;
    std::vector<double> s_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> tau_grid{0.5, 1.0, 1.5, 2.0};
    std::optional<double> t_min;
    double tol = 1e-10;
    bool operator==(const AnalysisBlock&) const = default;
};

struct OutputBlock {
    std::string csv_dir;
    std::string report;
    bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
    DomainBlock domain;
    MeasureBlock measure;
    std::vector<double> tau;
    ScheduleBlock schedule;
    SimulationBlock simulation;
    AnalysisBlock analysis;
    OutputBlock output;
    std::uint64_t seed = 0;
    bool operator==(const RunConfig&) const = default;
};

// Strict JSON schema: unknown keys, missing required keys (domain, tau, seed)
// and invalid values raise ConfigError naming the key and the constraint.
// tau may be given at top level or as schedule.tau, as a number or a list.
RunConfig parse_config(std::string_view text);

// Canonical JSON (sorted keys, every field explicit); parse_config of the
// result equals the input.
std::string serialize_config(const RunConfig& cfg);

// FNV-1a 64 of the canonical serialisation.
std::uint64_t config_hash(const RunConfig& cfg);

// Density ids accepted by measure.density.
std::vector<std::string> density_ids();

DomainSpec make_domain(const RunConfig& cfg);
MeasureSpec make_measure(const RunConfig& cfg, const DomainSpec& domain);
VerificationPlan make_plan(const RunConfig& cfg, double tau);

}  // namespace survlab
