#include "qvl/qfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qvl/assignment.hpp"
#include "qvl/errors.hpp"

namespace qvl {

namespace {

constexpr double kPi = std::numbers::pi;

void check_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("p must lie in (1, inf)");
}

bool near_origin(std::span<const double> a) {
    for (double x : a) {
        if (std::abs(x) > 1e-12) return false;
    }
    return true;
}

double sphere_area(int m, double r) {
    if (m == 2) return 2.0 * kPi * r;
    if (m == 3) return 4.0 * kPi * r * r;
    throw DomainError("sphere quadrature requires m = 2 or 3");
}

// Jet with one-sided fallback at nodes missing an axis neighbor. The public
// jet() wrapper enforces the interior precondition.
MatchedJet jet_impl(const QField& f, int node) {
    const GridDomain& g = f.domain();
    MatchedJet out;
    out.base = node;
    out.q = f.q();
    out.n = f.n();
    out.axes = g.axes();
    const QPoint& base = f.value(node);
    out.sheets = base.flat();
    out.partials.assign(static_cast<std::size_t>(out.q) * out.axes * out.n, 0.0);

    for (int k = 0; k < out.axes; ++k) {
        const int plus = g.neighbor(node, k, +1);
        const int minus = g.neighbor(node, k, -1);
        if (plus < 0 && minus < 0) continue;
        if (plus >= 0 && minus >= 0) {
            const double hp = g.spacing(node, k, +1);
            const double hm = g.spacing(node, k, -1);
            const auto sp = match_sheets(base, f.value(plus));
            const auto sm = match_sheets(base, f.value(minus));
            const double denom = hp * hm * (hp + hm);
            for (int i = 0; i < out.q; ++i) {
                auto fp = f.value(plus).sheet(sp[i]);
                auto fm = f.value(minus).sheet(sm[i]);
                auto fb = base.sheet(i);
                double* dst = out.partials.data() + (static_cast<std::size_t>(i) * out.axes + k) * out.n;
                for (int c = 0; c < out.n; ++c) {
                    dst[c] = (hm * hm * fp[c] - hp * hp * fm[c] + (hp * hp - hm * hm) * fb[c]) / denom;
                }
            }
        } else {
            const int dir = plus >= 0 ? +1 : -1;
            const int nb = plus >= 0 ? plus : minus;
            const double h = g.spacing(node, k, dir);
            const auto s = match_sheets(base, f.value(nb));
            for (int i = 0; i < out.q; ++i) {
                auto fn = f.value(nb).sheet(s[i]);
                auto fb = base.sheet(i);
                double* dst = out.partials.data() + (static_cast<std::size_t>(i) * out.axes + k) * out.n;
                for (int c = 0; c < out.n; ++c) dst[c] = dir * (fn[c] - fb[c]) / h;
            }
        }
    }
    return out;
}

bool is_polar_center(const GridDomain& g, int node) {
    return g.is_polar() && g.has_center() && node == g.center_node();
}

struct BallRegion {
    std::vector<int> nodes;
    std::vector<double> weights;
    double snapped_r = 0.0;
};

// Ball about a. Centered polar balls snap r to a ring radius and clip the
// outermost ring cells at it; everything else uses full node measures.
BallRegion ball_region(const QField& f, std::span<const double> a, double r) {
    const GridDomain& g = f.domain();
    BallRegion out;
    if (g.is_polar() && near_origin(a)) {
        if (g.kind() == GridKind::PolarAnnulus) throw DomainError("centered ball exits an annulus domain");
        if (!(r > 0.0 && r <= g.outer_radius() * (1.0 + 1e-12))) throw DomainError("ball radius outside domain");
        const int kring = g.nearest_ring(r);
        const double rk = g.ring_radius(kring);
        out.snapped_r = rk;
        if (g.has_center()) {
            out.nodes.push_back(g.center_node());
            out.weights.push_back(g.measure(g.center_node()));
        }
        for (int ring = 1; ring <= kring; ++ring) {
            const double width = (ring == kring) ? rk - g.ring_inner_face(ring) : g.ring_cell_width(ring);
            const double w = g.ring_radius(ring) * width * g.dtheta();
            for (int j = 0; j < g.n_theta(); ++j) {
                out.nodes.push_back(g.node_at(ring, j));
                out.weights.push_back(w);
            }
        }
        return out;
    }
    out.snapped_r = r;
    out.nodes = g.nodes_in_ball(a, r);
    if (out.nodes.empty()) throw DomainError("ball region contains no nodes");
    out.weights.reserve(out.nodes.size());
    for (int node : out.nodes) out.weights.push_back(g.measure(node));
    return out;
}

}  // namespace

QField::QField(std::shared_ptr<const GridDomain> domain, int q, int n)
    : domain_(std::move(domain)), q_(q), n_(n), values_(domain_->node_count(), QPoint::zero(q, n)) {
    if (q_ < 1 || n_ < 1) throw ShapeError("QField requires Q >= 1 and n >= 1");
}

QField QField::constant(std::shared_ptr<const GridDomain> domain, const QPoint& value) {
    QField f(std::move(domain), value.q(), value.n());
    for (int i = 0; i < f.domain().node_count(); ++i) f.values_[i] = value;
    return f;
}

void QField::set(int node, QPoint v) {
    if (v.q() != q_ || v.n() != n_) throw ShapeError("QField::set: value has wrong Q or n");
    values_[node] = std::move(v);
}

std::vector<int> match_sheets(const QPoint& a, const QPoint& b) {
    if (a.q() != b.q() || a.n() != b.n()) throw ShapeError("match_sheets: mismatched Q or n");
    const int q = a.q();
    if (q == 1) return {0};
    auto pair_cost = [&](int i, int j) {
        auto ai = a.sheet(i);
        auto bj = b.sheet(j);
        double s = 0.0;
        for (int c = 0; c < a.n(); ++c) {
            const double d = ai[c] - bj[c];
            s += d * d;
        }
        return s;
    };
    if (q == 2) {
        const double straight = pair_cost(0, 0) + pair_cost(1, 1);
        const double crossed = pair_cost(0, 1) + pair_cost(1, 0);
        return straight <= crossed ? std::vector<int>{0, 1} : std::vector<int>{1, 0};
    }
    std::vector<double> cost(static_cast<std::size_t>(q) * q);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) cost[i * static_cast<std::size_t>(q) + j] = pair_cost(i, j);
    }
    return min_cost_assignment(cost, q);
}

MatchedJet jet(const QField& f, int node) {
    if (is_polar_center(f.domain(), node)) throw DomainError("jet: polar center node has no difference frame");
    if (f.domain().is_boundary(node)) throw DomainError("jet: node lies on the boundary");
    return jet_impl(f, node);
}

double triple_norm(const MatchedJet& j) {
    double s = 0.0;
    for (double x : j.partials) s += x * x;
    return std::sqrt(s);
}

double energy(const QField& f, std::span<const int> region, double p) {
    check_p(p);
    const GridDomain& g = f.domain();
    double total = 0.0;
    for (int node : region) {
        if (is_polar_center(g, node)) continue;
        const double tn = triple_norm(jet_impl(f, node));
        total += g.measure(node) * std::pow(tn, p);
    }
    return total;
}

double energy(const QField& f, double p) {
    const auto nodes = f.domain().all_nodes();
    return energy(f, nodes, p);
}

double edge_energy(const QField& f, double p) {
    check_p(p);
    double total = 0.0;
    for (const auto& e : f.domain().edges()) {
        const double d = metric(f.value(e.a), f.value(e.b));
        total += e.weight * std::pow(d / e.len, p);
    }
    return total;
}

double edge_energy(const QField& f, std::span<const int> region, double p) {
    check_p(p);
    std::vector<char> in(f.domain().node_count(), 0);
    for (int node : region) in[node] = 1;
    double total = 0.0;
    for (const auto& e : f.domain().edges()) {
        if (!in[e.a] || !in[e.b]) continue;
        const double d = metric(f.value(e.a), f.value(e.b));
        total += e.weight * std::pow(d / e.len, p);
    }
    return total;
}

NodeValues trace(const QField& f) {
    NodeValues out;
    out.nodes = f.domain().boundary_nodes();
    out.values.reserve(out.nodes.size());
    for (int node : out.nodes) out.values.push_back(f.value(node));
    return out;
}

QPoint mean_on(const QField& f, std::span<const int> region) {
    if (region.empty()) throw DomainError("mean_on: empty region");
    QPoint cur = f.value(region.front());
    const int q = f.q(), n = f.n();
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> acc(static_cast<std::size_t>(q) * n, 0.0);
        for (int node : region) {
            const auto sigma = match_sheets(cur, f.value(node));
            for (int i = 0; i < q; ++i) {
                auto s = f.value(node).sheet(sigma[i]);
                for (int c = 0; c < n; ++c) acc[static_cast<std::size_t>(i) * n + c] += s[c];
            }
        }
        for (double& x : acc) x /= static_cast<double>(region.size());
        QPoint next(q, n, std::move(acc));
        const double moved = metric(next, cur);
        cur = std::move(next);
        if (moved <= 1e-14 * (1.0 + norm(cur))) break;
    }
    return cur;
}

QField snap_field(const QField& f, double tol) {
    QField out(f.domain_ptr(), f.q(), f.n());
    for (int node = 0; node < f.domain().node_count(); ++node) out.set(node, snap(f.value(node), tol));
    return out;
}

double snapped_radius(const GridDomain& g, double r) {
    if (!g.is_polar()) return r;
    return g.ring_radius(g.nearest_ring(r));
}

SphereIntegrals sphere_integrals(const QField& f, std::span<const double> a, double r) {
    const GridDomain& g = f.domain();
    SphereIntegrals out{r, 0.0, 0.0, 0.0};
    const int q = f.q(), n = f.n();

    if (g.is_polar()) {
        if (!near_origin(a)) throw DomainError("sphere_integrals: polar grids support spheres about the origin only");
        if (!(r > 0.0 && r <= g.outer_radius() * (1.0 + 1e-12))) throw DomainError("sphere_integrals: sphere exits domain");
        const int ring = g.nearest_ring(r);
        out.radius = g.ring_radius(ring);
        const double w = out.radius * g.dtheta();
        for (int j = 0; j < g.n_theta(); ++j) {
            const int node = g.node_at(ring, j);
            const QPoint& base = f.value(node);
            const MatchedJet jt = jet_impl(f, node);
            for (int i = 0; i < q; ++i) {
                auto sheet = base.sheet(i);
                auto dr = jt.partial(i, 0);  // radial axis
                double h2 = 0.0, pair = 0.0, sq = 0.0;
                for (int c = 0; c < n; ++c) {
                    h2 += sheet[c] * sheet[c];
                    pair += dr[c] * sheet[c];
                    sq += dr[c] * dr[c];
                }
                out.h2 += w * h2;
                out.radial_pair += w * pair;
                out.radial_square += w * sq;
            }
        }
        return out;
    }

    const int m = g.m();
    const double h = g.step()[0];
    if (g.kind() == GridKind::Ball) {
        double na = 0.0;
        for (int k = 0; k < m; ++k) na += (k < static_cast<int>(a.size()) ? a[k] * a[k] : 0.0);
        if (std::sqrt(na) + r > g.outer_radius() + 1e-12) throw DomainError("sphere_integrals: sphere exits domain");
    }
    double sum_h2 = 0.0, sum_pair = 0.0, sum_sq = 0.0;
    int count = 0;
    for (int node = 0; node < g.node_count(); ++node) {
        const auto x = g.coord(node);
        double s2 = 0.0;
        for (int k = 0; k < m; ++k) {
            const double d = x[k] - (k < static_cast<int>(a.size()) ? a[k] : 0.0);
            s2 += d * d;
        }
        const double s = std::sqrt(s2);
        if (s < r - h / 2 || s >= r + h / 2 || s == 0.0) continue;
        ++count;
        std::array<double, 3> nu{0.0, 0.0, 0.0};
        for (int k = 0; k < m; ++k) nu[k] = (x[k] - (k < static_cast<int>(a.size()) ? a[k] : 0.0)) / s;
        const QPoint& base = f.value(node);
        const MatchedJet jt = jet_impl(f, node);
        for (int i = 0; i < q; ++i) {
            auto sheet = base.sheet(i);
            double h2 = 0.0, pair = 0.0, sq = 0.0;
            for (int c = 0; c < n; ++c) {
                double dnu = 0.0;
                for (int k = 0; k < m; ++k) dnu += jt.partial(i, k)[c] * nu[k];
                h2 += sheet[c] * sheet[c];
                pair += dnu * sheet[c];
                sq += dnu * dnu;
            }
            sum_h2 += h2;
            sum_pair += pair;
            sum_sq += sq;
        }
    }
    if (count == 0) throw DomainError("sphere_integrals: empty shell");
    const double area = sphere_area(m, r);
    out.h2 = sum_h2 / count * area;
    out.radial_pair = sum_pair / count * area;
    out.radial_square = sum_sq / count * area;
    return out;
}

double ball_energy(const QField& f, std::span<const double> a, double r, double p) {
    check_p(p);
    const GridDomain& g = f.domain();
    const BallRegion region = ball_region(f, a, r);
    double total = 0.0;
    for (std::size_t idx = 0; idx < region.nodes.size(); ++idx) {
        const int node = region.nodes[idx];
        if (is_polar_center(g, node)) continue;
        total += region.weights[idx] * std::pow(triple_norm(jet_impl(f, node)), p);
    }
    return total;
}

double ball_l2(const QField& f, std::span<const double> a, double r) {
    const BallRegion region = ball_region(f, a, r);
    double total = 0.0;
    for (std::size_t idx = 0; idx < region.nodes.size(); ++idx) {
        const QPoint& v = f.value(region.nodes[idx]);
        double h2 = 0.0;
        for (double x : v.flat()) h2 += x * x;
        total += region.weights[idx] * h2;
    }
    return total;
}

double ball_volume(const QField& f, std::span<const double> a, double r) {
    const BallRegion region = ball_region(f, a, r);
    double total = 0.0;
    for (double w : region.weights) total += w;
    return total;
}

double mean_oscillation(const QField& f, std::span<const double> a, double r) {
    const BallRegion region = ball_region(f, a, r);
    const QPoint mean = mean_on(f, region.nodes);
    double total = 0.0, vol = 0.0;
    for (std::size_t idx = 0; idx < region.nodes.size(); ++idx) {
        const double d = metric(f.value(region.nodes[idx]), mean);
        total += region.weights[idx] * d * d;
        vol += region.weights[idx];
    }
    return total / vol;
}

std::vector<double> jet_density(const QField& f, double p) {
    check_p(p);
    const GridDomain& g = f.domain();
    std::vector<double> out(g.node_count(), 0.0);
    for (int node = 0; node < g.node_count(); ++node) {
        if (is_polar_center(g, node)) continue;
        out[node] = std::pow(triple_norm(jet_impl(f, node)), p);
    }
    return out;
}

double ball_integral(const QField& f, std::span<const double> density, std::span<const double> a, double r) {
    const BallRegion region = ball_region(f, a, r);
    double total = 0.0;
    for (std::size_t idx = 0; idx < region.nodes.size(); ++idx) {
        total += region.weights[idx] * density[region.nodes[idx]];
    }
    return total;
}

double boundary_tangential_energy(const QField& f, std::span<const double> a, double r, double p) {
    check_p(p);
    const GridDomain& g = f.domain();
    const int q = f.q(), n = f.n();

    if (g.is_polar()) {
        if (!near_origin(a)) throw DomainError("boundary_tangential_energy: polar grids use the origin");
        const int ring = g.nearest_ring(r);
        const double rr = g.ring_radius(ring);
        double total = 0.0;
        for (int j = 0; j < g.n_theta(); ++j) {
            const MatchedJet jt = jet_impl(f, g.node_at(ring, j));
            double density = 0.0;
            for (int i = 0; i < q; ++i) {
                auto dth = jt.partial(i, 1);  // angular axis, already arc-length scaled
                for (int c = 0; c < n; ++c) density += dth[c] * dth[c];
            }
            total += rr * g.dtheta() * std::pow(density, p / 2.0);
        }
        return total;
    }

    const int m = g.m();
    const double h = g.step()[0];
    double sum = 0.0;
    int count = 0;
    for (int node = 0; node < g.node_count(); ++node) {
        const auto x = g.coord(node);
        double s2 = 0.0;
        for (int k = 0; k < m; ++k) {
            const double d = x[k] - (k < static_cast<int>(a.size()) ? a[k] : 0.0);
            s2 += d * d;
        }
        const double s = std::sqrt(s2);
        if (s < r - h / 2 || s >= r + h / 2 || s == 0.0) continue;
        ++count;
        std::array<double, 3> nu{0.0, 0.0, 0.0};
        for (int k = 0; k < m; ++k) nu[k] = (x[k] - (k < static_cast<int>(a.size()) ? a[k] : 0.0)) / s;
        const MatchedJet jt = jet_impl(f, node);
        double density = 0.0;
        for (int i = 0; i < q; ++i) {
            for (int c = 0; c < n; ++c) {
                double dnu = 0.0;
                for (int k = 0; k < m; ++k) dnu += jt.partial(i, k)[c] * nu[k];
                for (int k = 0; k < m; ++k) {
                    const double tang = jt.partial(i, k)[c] - dnu * nu[k];
                    density += tang * tang;
                }
            }
        }
        sum += std::pow(density, p / 2.0);
    }
    if (count == 0) throw DomainError("boundary_tangential_energy: empty shell");
    return sum / count * sphere_area(m, r);
}

}  // namespace qvl
