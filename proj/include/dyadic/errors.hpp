#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dyadic {

/// Raised when a quantity defined by an infinite series diverges
/// (e.g. the rate constant at lambda = 1).
class DivergenceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A simulated path left the representable range. Usually means the time
/// step is too large for the configured N and lambda.
class NonFiniteStateError : public std::runtime_error {
public:
    NonFiniteStateError(const std::string& what, std::size_t path_index, double time)
        : std::runtime_error(what), path_index_(path_index), time_(time) {}

    std::size_t path_index() const noexcept { return path_index_; }
    double time() const noexcept { return time_; }

private:
    std::size_t path_index_;
    double time_;
};

class StepSizeUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MassUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operator entries span more orders of magnitude than binary64 can hold
/// after rescaling.
class ScalingLimitError : public std::range_error {
public:
    using std::range_error::range_error;
};

class NonPositiveVarianceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace dyadic
