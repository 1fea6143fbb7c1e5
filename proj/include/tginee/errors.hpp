#pragma once

#include <stdexcept>
#include <string>

namespace tginee {

struct CovarianceSingularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergedError : std::runtime_error {
    int epoch;
    DivergedError(const std::string& msg, int at_epoch)
        : std::runtime_error(msg), epoch(at_epoch) {}
};

struct TaskUndefinedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateGraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndefinedMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tginee
