#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace calib {

// Bad user input: malformed files, dimension mismatches, out-of-range flags.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// The measurement plan cannot identify the requested parameter set.
class IdentifiabilityError : public std::runtime_error {
public:
    explicit IdentifiabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation produced NaN/Inf or otherwise broke down numerically.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative identification failed to converge; carries the residual history.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, std::vector<double> history)
        : std::runtime_error(msg), residual_history(std::move(history)) {}

    std::vector<double> residual_history;
};

} // namespace calib
