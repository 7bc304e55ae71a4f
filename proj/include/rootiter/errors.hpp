#pragma once

#include <stdexcept>
#include <string>

namespace rootiter {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation at or too close to a pole of a rational function.
struct PoleError : Error {
    using Error::Error;
};

// Requested degree/size exceeds the implemented range.
struct CapacityError : Error {
    using Error::Error;
};

// Zero/constant polynomial where a nontrivial one is required, E >= 1, etc.
struct DegenerateError : Error {
    using Error::Error;
};

// Denominator roots too close together for a partial fraction expansion.
struct MultiplePoleError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct SingularMatrixError : Error {
    using Error::Error;
};

// Remez exchange failed to level within the iteration budget.
struct NonConvergenceError : Error {
    explicit NonConvergenceError(const std::string& what, double best_level = 0.0)
        : Error(what), best_level(best_level) {}
    double best_level;
};

// Matrix iteration left the basin of attraction.
struct DivergenceError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct InvalidSpectrumError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, long line) : Error(what), line(line) {}
    long line;
};

}  // namespace rootiter
