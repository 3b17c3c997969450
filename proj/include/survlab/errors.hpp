#pragma once

#include <stdexcept>
#include <string>

namespace survlab {

// Argument outside the mathematical domain of an operation (non-finite input,
// point outside Q, negative mean, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// The (domain, sigma) combination has no closed-form eigenbasis.
class UnsupportedDomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Series evaluation requested below the certified time floor.
class TruncationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A numerical result could not be certified to the requested accuracy.
class AccuracyError : public std::runtime_error {
  public:
    AccuracyError(const std::string& what, double estimate)
        : std::runtime_error(what), estimate_(estimate) {}

    double estimate() const noexcept { return estimate_; }

  private:
    double estimate_;
};

// Work requested exceeds a configured budget or hard limit.
class CapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Rejection sampler acceptance rate too low.
class EfficiencyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Goodness-of-fit statistic undefined (all expected mass in one bin).
class DegenerateFitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invalid run configuration; the message names the offending key.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace survlab
