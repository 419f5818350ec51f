#pragma once

#include <stdexcept>

namespace segsim {

// Invalid model or algorithm parameters; the message names the violated bound.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation applied to a state that cannot support it (e.g. no agents).
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// Metric requested on a state with no population to measure.
struct MetricError : std::logic_error {
    using std::logic_error::logic_error;
};

// Statistic requested on too small a sample.
struct StatisticsError : std::logic_error {
    using std::logic_error::logic_error;
};

// Request exceeds an algorithm's hard size limit.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File or directory I/O failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace segsim
