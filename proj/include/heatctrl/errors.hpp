#pragma once

#include <stdexcept>
#include <string>

namespace heatctrl {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the domain a routine can handle (x outside a grid,
/// negative time, lambda beyond the tabulated range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A grid is too small/degenerate for the requested stencil or rule.
class GridError : public Error {
public:
    using Error::Error;
};

/// An iterative scheme failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double last_residual)
        : Error(msg), last_residual(last_residual) {}
    double last_residual;
};

/// Coefficient or sampled-data evaluation failed (NaN/inf, exception from
/// a user callback); carries the offending abscissa.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& msg, double where)
        : Error(msg), where(where) {}
    double where;
};

/// A fitted tail does not decay, so a half-axis integral cannot be closed.
class TailDivergenceError : public Error {
public:
    using Error::Error;
};

/// Bad run configuration (CLI layer).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace heatctrl
