#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace surfsub {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed configuration, unknown keys or presets.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A sub-solver (Newton, linear solve, constitutive evaluation) failed.
class SolverError : public Error {
public:
    using Error::Error;
};

/// A coupling iteration exceeded its iteration budget.
///
/// Carries the residual history so callers can inspect the growth rate.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::vector<double> residuals)
        : Error(what), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

}  // namespace surfsub
