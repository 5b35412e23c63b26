#include "qvl/assignment.hpp"

#include <cassert>
#include <limits>

namespace qvl {

std::vector<int> min_cost_assignment(std::span<const double> cost, int q) {
    assert(static_cast<std::size_t>(q) * q == cost.size());
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Potentials u, v and column matching p, 1-indexed with a virtual row 0.
    std::vector<double> u(q + 1, 0.0), v(q + 1, 0.0);
    std::vector<int> p(q + 1, 0), way(q + 1, 0);

    for (int i = 1; i <= q; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(q + 1, inf);
        std::vector<char> used(q + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= q; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * static_cast<std::size_t>(q) + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= q; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> sigma(q, -1);
    for (int j = 1; j <= q; ++j) {
        if (p[j]) sigma[p[j] - 1] = j - 1;
    }
    return sigma;
}

double assignment_cost(std::span<const double> cost, int q, std::span<const int> sigma) {
    double total = 0.0;
    for (int i = 0; i < q; ++i) total += cost[i * static_cast<std::size_t>(q) + sigma[i]];
    return total;
}

}  // namespace qvl
