#pragma once

#include <stdexcept>
#include <string>

namespace bakhfem {

// Thrown when a mesh/study configuration violates a documented precondition
// (mesh feasibility conditions, N not a multiple of 4, bad CLI arguments...).
// The CLI maps this to exit code 2.
struct invalid_config : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when the linear solver cannot reach the requested tolerance.
struct solver_failure : std::runtime_error {
    solver_failure(const std::string& what, double residual_, int iterations_)
        : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
    double residual;
    int iterations;
};

} // namespace bakhfem
