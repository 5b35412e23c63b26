#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qvl {

/// Minimum-cost perfect assignment on a dense Q x Q cost matrix (row-major).
/// Returns sigma with sigma[i] = column matched to row i.
/// Shortest-augmenting-path (Hungarian) method with potentials, O(Q^3).
std::vector<int> min_cost_assignment(std::span<const double> cost, int q);

/// Total cost of a given assignment.
double assignment_cost(std::span<const double> cost, int q, std::span<const int> sigma);

}  // namespace qvl
