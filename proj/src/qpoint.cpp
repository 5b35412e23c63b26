#include "qvl/qpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qvl/assignment.hpp"
#include "qvl/errors.hpp"

namespace qvl {

namespace {

bool lex_less(const double* a, const double* b, int n) {
    return std::lexicographical_compare(a, a + n, b, b + n);
}

void check_finite(const std::vector<double>& data) {
    for (double x : data) {
        if (!std::isfinite(x)) throw ParameterError("QPoint coordinates must be finite");
    }
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

// Union-find over sheet indices.
struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int q) : parent(q) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Clusters of sheets whose pairwise distance graph (edges <= threshold) is
// connected. Cluster order follows the smallest member index.
std::vector<std::vector<int>> linkage_clusters(const QPoint& p, double threshold) {
    DisjointSets ds(p.q());
    for (int i = 0; i < p.q(); ++i) {
        for (int j = i + 1; j < p.q(); ++j) {
            if (std::sqrt(sq_dist(p.sheet(i), p.sheet(j))) <= threshold) ds.unite(i, j);
        }
    }
    std::vector<std::vector<int>> groups;
    std::vector<int> group_of(p.q(), -1);
    for (int i = 0; i < p.q(); ++i) {
        const int root = ds.find(i);
        if (group_of[root] < 0) {
            group_of[root] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[group_of[root]].push_back(i);
    }
    return groups;
}

QPoint collapse_to_barycenters(const QPoint& p, const std::vector<std::vector<int>>& groups) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(p.q()) * p.n());
    for (const auto& g : groups) {
        std::vector<double> center(p.n(), 0.0);
        for (int i : g) {
            auto s = p.sheet(i);
            for (int k = 0; k < p.n(); ++k) center[k] += s[k];
        }
        for (int k = 0; k < p.n(); ++k) center[k] /= static_cast<double>(g.size());
        for (std::size_t c = 0; c < g.size(); ++c) flat.insert(flat.end(), center.begin(), center.end());
    }
    return QPoint(p.q(), p.n(), std::move(flat));
}

}  // namespace

QPoint::QPoint(int q, int n, std::vector<double> flat) : q_(q), n_(n), data_(std::move(flat)) {
    if (q_ <= 0 || n_ <= 0) throw ShapeError("QPoint requires Q >= 1 and n >= 1");
    if (data_.size() != static_cast<std::size_t>(q_) * n_) throw ShapeError("QPoint flat data has wrong size");
    check_finite(data_);
    // Canonical order: sort sheet blocks lexicographically.
    std::vector<int> order(q_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return lex_less(data_.data() + static_cast<std::size_t>(a) * n_, data_.data() + static_cast<std::size_t>(b) * n_, n_);
    });
    std::vector<double> sorted(data_.size());
    for (int i = 0; i < q_; ++i) {
        std::copy_n(data_.data() + static_cast<std::size_t>(order[i]) * n_, n_, sorted.data() + static_cast<std::size_t>(i) * n_);
    }
    data_ = std::move(sorted);
}

QPoint QPoint::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ShapeError("QPoint needs at least one sheet");
    const int n = static_cast<int>(rows.front().size());
    std::vector<double> flat;
    flat.reserve(rows.size() * n);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != n) throw ShapeError("QPoint sheets must share one dimension");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return QPoint(static_cast<int>(rows.size()), n, std::move(flat));
}

QPoint QPoint::zero(int q, int n) {
    return QPoint(q, n, std::vector<double>(static_cast<std::size_t>(q) * n, 0.0));
}

QPoint QPoint::splat(int q, std::span<const double> value) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(q) * value.size());
    for (int i = 0; i < q; ++i) flat.insert(flat.end(), value.begin(), value.end());
    return QPoint(q, static_cast<int>(value.size()), std::move(flat));
}

double metric(const QPoint& u, const QPoint& v) {
    if (u.q() != v.q() || u.n() != v.n()) throw ShapeError("metric: mismatched Q or n");
    const int q = u.q();
    std::vector<double> cost(static_cast<std::size_t>(q) * q);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) cost[i * static_cast<std::size_t>(q) + j] = sq_dist(u.sheet(i), v.sheet(j));
    }
    const auto sigma = min_cost_assignment(cost, q);
    return std::sqrt(std::max(0.0, assignment_cost(cost, q, sigma)));
}

double norm(const QPoint& u) {
    double s = 0.0;
    for (double x : u.flat()) s += x * x;
    return std::sqrt(s);
}

std::vector<double> barycenter(const QPoint& u) {
    std::vector<double> mean(u.n(), 0.0);
    for (int i = 0; i < u.q(); ++i) {
        auto s = u.sheet(i);
        for (int k = 0; k < u.n(); ++k) mean[k] += s[k];
    }
    for (double& x : mean) x /= static_cast<double>(u.q());
    return mean;
}

QPoint translate(const QPoint& u, std::span<const double> a) {
    if (static_cast<int>(a.size()) != u.n()) throw ShapeError("translate: dimension mismatch");
    std::vector<double> flat = u.flat();
    for (int i = 0; i < u.q(); ++i) {
        for (int k = 0; k < u.n(); ++k) flat[static_cast<std::size_t>(i) * u.n() + k] -= a[k];
    }
    return QPoint(u.q(), u.n(), std::move(flat));
}

QPoint concat(const QPoint& u, const QPoint& v) {
    if (u.n() != v.n()) throw ShapeError("concat: dimension mismatch");
    std::vector<double> flat = u.flat();
    flat.insert(flat.end(), v.flat().begin(), v.flat().end());
    return QPoint(u.q() + v.q(), u.n(), std::move(flat));
}

double diameter(const QPoint& v) {
    double d2 = 0.0;
    for (int i = 0; i < v.q(); ++i) {
        for (int j = i + 1; j < v.q(); ++j) d2 = std::max(d2, sq_dist(v.sheet(i), v.sheet(j)));
    }
    return std::sqrt(d2);
}

double splitting(const QPoint& v) {
    double s2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < v.q(); ++i) {
        for (int j = i + 1; j < v.q(); ++j) {
            const double d2 = sq_dist(v.sheet(i), v.sheet(j));
            if (d2 > 0.0) s2 = std::min(s2, d2);
        }
    }
    return std::isfinite(s2) ? std::sqrt(s2) : s2;
}

QPoint snap(const QPoint& v, double tol) {
    if (tol < 0.0) throw ParameterError("snap: tol must be nonnegative");
    return collapse_to_barycenters(v, linkage_clusters(v, tol));
}

QPoint retraction(const QPoint& v, double r, const QPoint& u) {
    if (u.q() != v.q() || u.n() != v.n()) throw ShapeError("retraction: mismatched Q or n");
    const double s = splitting(v);
    if (!std::isfinite(s)) throw DomainError("retraction: center point has a single value (splitting = +inf)");
    if (!(r > 0.0 && r < s / 4.0)) throw DomainError("retraction: need 0 < r < splitting(v)/4");

    const double g = metric(u, v);
    if (g <= r) return u;
    if (g >= 2.0 * r) return v;

    // Group sheets of u by the optimal matching against v; since
    // metric(u, v) < 2r < splitting(v)/2, the matched center is the nearest
    // distinct value of v for every sheet.
    const int q = u.q();
    std::vector<double> cost(static_cast<std::size_t>(q) * q);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) cost[i * static_cast<std::size_t>(q) + j] = sq_dist(u.sheet(i), v.sheet(j));
    }
    const auto sigma = min_cost_assignment(cost, q);
    const double lambda = (2.0 * r - g) / g;
    std::vector<double> flat(static_cast<std::size_t>(q) * u.n());
    for (int i = 0; i < q; ++i) {
        auto ui = u.sheet(i);
        auto c = v.sheet(sigma[i]);
        for (int k = 0; k < u.n(); ++k) flat[static_cast<std::size_t>(i) * u.n() + k] = lambda * (ui[k] - c[k]) + c[k];
    }
    return QPoint(q, u.n(), std::move(flat));
}

LogValue beta(double eps, int q) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ParameterError("beta: eps must lie in (0, 1]");
    if (q < 1) throw ParameterError("beta: Q must be positive");
    const double log_value = std::pow(3.0, q) * std::log(eps / 3.0);
    return LogValue{log_value, std::exp(log_value)};
}

QPoint separate(const QPoint& p, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("separate: eps must lie in (0, 1)");
    if (std::isinf(splitting(p))) throw DomainError("separate: input has a single value (splitting = +inf)");

    const double d = diameter(p);
    const LogValue b = beta(eps, p.q());
    const double log_threshold = b.log_value + std::log(d);

    // Candidate scales: 0 (exact-equality groups) then each pairwise distance.
    std::vector<double> scales{0.0};
    for (int i = 0; i < p.q(); ++i) {
        for (int j = i + 1; j < p.q(); ++j) scales.push_back(std::sqrt(sq_dist(p.sheet(i), p.sheet(j))));
    }
    std::sort(scales.begin(), scales.end());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

    for (double t : scales) {
        const auto groups = linkage_clusters(p, t);
        if (groups.size() < 2) break;  // coarser clusterings only get smaller
        const QPoint candidate = collapse_to_barycenters(p, groups);
        const double s = splitting(candidate);
        if (!std::isfinite(s) || s <= 0.0) continue;  // barycenters collided
        if (std::log(s) < log_threshold) continue;
        if (metric(candidate, p) > eps * s) continue;
        return candidate;
    }
    throw ConstructionError("separate: no clustering satisfied the separation postconditions");
}

QSplit split_point(const QPoint& p) {
    QSplit out;
    out.groups = linkage_clusters(p, 0.0);
    for (const auto& g : out.groups) {
        auto s = p.sheet(g.front());
        out.centers.emplace_back(s.begin(), s.end());
        out.multiplicities.push_back(static_cast<int>(g.size()));
    }
    return out;
}

std::vector<QPoint> split_value(const QPoint& u, const QPoint& pt) {
    if (u.q() != pt.q() || u.n() != pt.n()) throw ShapeError("split_value: mismatched Q or n");
    const double s = splitting(pt);
    const double g = metric(u, pt);
    if (!(g < s / 4.0)) throw SplitError("split_value: metric(u, P) >= splitting(P)/4, closeness hypothesis failed");

    const QSplit split = split_point(pt);
    std::vector<std::vector<std::vector<double>>> buckets(split.j());
    for (int i = 0; i < u.q(); ++i) {
        auto sheet = u.sheet(i);
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < split.j(); ++c) {
            const double d = sq_dist(sheet, split.centers[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        buckets[best].emplace_back(sheet.begin(), sheet.end());
    }
    std::vector<QPoint> parts;
    parts.reserve(buckets.size());
    for (int c = 0; c < split.j(); ++c) {
        if (static_cast<int>(buckets[c].size()) != split.multiplicities[c]) {
            throw SplitError("split_value: cluster sizes disagree with multiplicities");
        }
        parts.push_back(QPoint::from_rows(buckets[c]));
    }
    return parts;
}

}  // namespace qvl
