#pragma once

#include <stdexcept>
#include <string>

namespace twostage {

// Quadrature failure, derivative instability, posterior underflow.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Root bracketing / residual failures.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace twostage
