#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qvl {

// Error taxonomy used across the library. All inherit from std::runtime_error
// (or std::invalid_argument for caller mistakes) so generic handlers work.

/// Mismatched multiplicities, ambient dimensions, or grid resolutions.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Geometric precondition violated (node outside domain, ball exits grid, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Scalar parameter out of range (p <= 1, alpha <= 0, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A constructive procedure failed to satisfy its advertised postconditions.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// split_value called with data violating the closeness hypothesis.
struct SplitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Iterative solver ran out of sweeps. Carries the energy trace so callers
/// can inspect how far it got.
struct ConvergenceError : std::runtime_error {
    std::vector<double> energy_trace;
    ConvergenceError(const std::string& what, std::vector<double> trace)
        : std::runtime_error(what), energy_trace(std::move(trace)) {}
};

}  // namespace qvl
