#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qvl/qfield.hpp"

namespace qvl {

/// Samples fn(coord) -> QPoint at every node.
template <typename F>
QField sample_field(std::shared_ptr<const GridDomain> domain, int q, int n, F&& fn) {
    QField out(std::move(domain), q, n);
    for (int node = 0; node < out.domain().node_count(); ++node) {
        out.set(node, fn(out.domain().coord(node)));
    }
    return out;
}

/// Q copies of a constant vector at every node.
QField make_constant_field(std::shared_ptr<const GridDomain> domain, const QPoint& value);

/// Single-valued linear map x -> A x (rows of a define the output components).
QField make_linear_field(std::shared_ptr<const GridDomain> domain, const std::vector<std::vector<double>>& a);

/// Re((x + iy)^k), single-valued harmonic polynomial sample (m = 2).
QField make_harmonic_field(std::shared_ptr<const GridDomain> domain, int degree);

/// Two-valued planar branch pair with sheets +-z^{k/2} (values in R^2).
/// The canonical frequency-k/2 stationary example.
QField make_branch_pair_field(std::shared_ptr<const GridDomain> domain, int k);

/// Branch pair values frozen at radius 1 (degree-0 homogeneous), sheets
/// +-(cos(k theta/2), sin(k theta/2)).
QField make_branch_pair_angular_field(std::shared_ptr<const GridDomain> domain, int k);

/// Builds a family by id with JSON-ish parameter lookup handled by the CLI;
/// see scenario.hpp for the dispatcher.

}  // namespace qvl
