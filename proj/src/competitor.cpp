#include "qvl/competitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qvl/assignment.hpp"
#include "qvl/errors.hpp"

namespace qvl {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm2(const QPoint& v) {
    double s = 0.0;
    for (double x : v.flat()) s += x * x;
    return s;
}

// Matched linear interpolation (1-t) a + t b along the optimal pairing.
QPoint matched_mix(const QPoint& a, const QPoint& b, double t) {
    const auto sigma = match_sheets(a, b);
    std::vector<double> flat(a.flat().size());
    for (int i = 0; i < a.q(); ++i) {
        auto ai = a.sheet(i);
        auto bi = b.sheet(sigma[i]);
        for (int c = 0; c < a.n(); ++c) flat[static_cast<std::size_t>(i) * a.n() + c] = (1.0 - t) * ai[c] + t * bi[c];
    }
    return QPoint(a.q(), a.n(), std::move(flat));
}

int closest_divisor(int n, double target) {
    int best = 1;
    double bestd = std::abs(1.0 - target);
    for (int d = 1; d <= n; ++d) {
        if (n % d != 0) continue;
        const double dist = std::abs(d - target);
        if (dist < bestd) {
            bestd = dist;
            best = d;
        }
    }
    return best;
}
}  // namespace

int m_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("m_p: p must lie in (1, inf)");
    const double floor_p = std::floor(p);
    if (p == floor_p) return static_cast<int>(floor_p) - 1;
    return static_cast<int>(floor_p);
}

QPoint frechet_mean(std::span<const QPoint> points) {
    if (points.empty()) throw DomainError("frechet_mean: empty input");
    QPoint cur = points.front();
    const int q = cur.q(), n = cur.n();
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> acc(static_cast<std::size_t>(q) * n, 0.0);
        for (const QPoint& p : points) {
            const auto sigma = match_sheets(cur, p);
            for (int i = 0; i < q; ++i) {
                auto s = p.sheet(sigma[i]);
                for (int c = 0; c < n; ++c) acc[static_cast<std::size_t>(i) * n + c] += s[c];
            }
        }
        for (double& x : acc) x /= static_cast<double>(points.size());
        QPoint next(q, n, std::move(acc));
        const double moved = metric(next, cur);
        cur = std::move(next);
        if (moved <= 1e-14 * (1.0 + norm(cur))) break;
    }
    return cur;
}

SphereSamples SphereSamples::circle(int ntheta, int q, int n) {
    if (ntheta < 4) throw ParameterError("SphereSamples::circle: ntheta >= 4");
    SphereSamples s;
    s.m_ = 2;
    s.q_ = q;
    s.n_ = n;
    s.dirs_.resize(3 * static_cast<std::size_t>(ntheta), 0.0);
    s.weights_.assign(ntheta, kTwoPi / ntheta);
    s.values_.assign(ntheta, QPoint::zero(q, n));
    for (int j = 0; j < ntheta; ++j) {
        const double th = kTwoPi * j / ntheta;
        s.dirs_[3 * j] = std::cos(th);
        s.dirs_[3 * j + 1] = std::sin(th);
    }
    return s;
}

SphereSamples SphereSamples::lat_long(int nphi, int npsi, int q, int n) {
    if (nphi < 2 || npsi < 4) throw ParameterError("SphereSamples::lat_long: need nphi >= 2, npsi >= 4");
    SphereSamples s;
    s.m_ = 3;
    s.q_ = q;
    s.n_ = n;
    s.nphi_ = nphi;
    s.npsi_ = npsi;
    const int count = nphi * npsi;
    s.dirs_.resize(3 * static_cast<std::size_t>(count));
    s.weights_.resize(count);
    s.values_.assign(count, QPoint::zero(q, n));
    const double dphi = kPi / nphi, dpsi = kTwoPi / npsi;
    double total = 0.0;
    for (int a = 0; a < nphi; ++a) {
        const double phi = (a + 0.5) * dphi;
        for (int b = 0; b < npsi; ++b) {
            const double psi = b * dpsi;
            const int i = a * npsi + b;
            s.dirs_[3 * i] = std::sin(phi) * std::cos(psi);
            s.dirs_[3 * i + 1] = std::sin(phi) * std::sin(psi);
            s.dirs_[3 * i + 2] = std::cos(phi);
            s.weights_[i] = std::sin(phi) * dphi * dpsi;
            total += s.weights_[i];
        }
    }
    for (double& w : s.weights_) w *= 4.0 * kPi / total;
    return s;
}

SphereSamples SphereSamples::from_polar_trace(const QField& f) {
    const GridDomain& g = f.domain();
    if (!g.is_polar()) throw ShapeError("from_polar_trace: polar grid required");
    SphereSamples s = circle(g.n_theta(), f.q(), f.n());
    for (int j = 0; j < g.n_theta(); ++j) s.values_[j] = f.value(g.node_at(g.ring_count(), j));
    return s;
}

void SphereSamples::set_value(int i, QPoint v) {
    if (v.q() != q_ || v.n() != n_) throw ShapeError("SphereSamples::set_value: wrong Q or n");
    values_[i] = std::move(v);
}

int SphereSamples::circle_count() const { return m_ == 2 ? count() : 0; }
double SphereSamples::dtheta() const { return kTwoPi / count(); }

int SphereSamples::nearest(std::span<const double> dir) const {
    if (m_ == 2) {
        double th = std::atan2(dir[1], dir[0]);
        if (th < 0) th += kTwoPi;
        const int nt = count();
        return static_cast<int>(std::lround(th / kTwoPi * nt)) % nt;
    }
    const double dphi = kPi / nphi_, dpsi = kTwoPi / npsi_;
    const double phi = std::acos(std::clamp(dir[2], -1.0, 1.0));
    int a = static_cast<int>(std::lround(phi / dphi - 0.5));
    a = std::clamp(a, 0, nphi_ - 1);
    double psi = std::atan2(dir[1], dir[0]);
    if (psi < 0) psi += kTwoPi;
    const int b = static_cast<int>(std::lround(psi / dpsi)) % npsi_;
    return a * npsi_ + b;
}

double SphereSamples::tangential_density(int i) const {
    const int q = q_, n = n_;
    double density = 0.0;
    auto add_axis = [&](const QPoint& minus, const QPoint& plus, double dist) {
        const auto sp = match_sheets(values_[i], plus);
        const auto sm = match_sheets(values_[i], minus);
        for (int s = 0; s < q; ++s) {
            auto vp = plus.sheet(sp[s]);
            auto vm = minus.sheet(sm[s]);
            for (int c = 0; c < n; ++c) {
                const double d = (vp[c] - vm[c]) / dist;
                density += d * d;
            }
        }
    };
    if (m_ == 2) {
        const int nt = count();
        add_axis(values_[(i + nt - 1) % nt], values_[(i + 1) % nt], 2.0 * dtheta());
        return density;
    }
    const double dphi = kPi / nphi_, dpsi = kTwoPi / npsi_;
    const int a = i / npsi_, b = i % npsi_;
    // colatitude axis (one-sided at the caps)
    if (a > 0 && a < nphi_ - 1) {
        add_axis(values_[(a - 1) * npsi_ + b], values_[(a + 1) * npsi_ + b], 2.0 * dphi);
    } else if (a == 0) {
        add_axis(values_[i], values_[(a + 1) * npsi_ + b], dphi);
    } else {
        add_axis(values_[(a - 1) * npsi_ + b], values_[i], dphi);
    }
    // azimuth axis, arc length sin(phi) * dpsi
    const double sphi = std::sin((a + 0.5) * dphi);
    add_axis(values_[a * npsi_ + (b + npsi_ - 1) % npsi_], values_[a * npsi_ + (b + 1) % npsi_], 2.0 * sphi * dpsi);
    return density;
}

double SphereSamples::tangential_energy(double p) const {
    double total = 0.0;
    for (int i = 0; i < count(); ++i) total += weights_[i] * std::pow(tangential_density(i), p / 2.0);
    return total;
}

double SphereSamples::norm_p_integral(double p) const {
    double total = 0.0;
    for (int i = 0; i < count(); ++i) total += weights_[i] * std::pow(norm2(values_[i]), p / 2.0);
    return total;
}

double SphereSamples::metric_p_integral(const SphereSamples& other, double p) const {
    if (other.count() != count() || other.q() != q_ || other.n() != n_) {
        throw ShapeError("metric_p_integral: mismatched sample sets");
    }
    double total = 0.0;
    for (int i = 0; i < count(); ++i) total += weights_[i] * std::pow(metric(values_[i], other.values_[i]), p);
    return total;
}

QField radial_extension(const SphereSamples& g, double alpha, std::shared_ptr<const GridDomain> target) {
    if (!(alpha > 0.0)) throw ParameterError("radial_extension: alpha must be positive");
    const GridDomain& dom = *target;
    if (dom.is_polar()) {
        if (g.m() != 2) throw ShapeError("radial_extension: polar target needs circle samples");
        QField out(target, g.q(), g.n());
        const bool aligned = g.count() == dom.n_theta();
        const double r_out = dom.outer_radius();
        for (int node = 0; node < dom.node_count(); ++node) {
            if (dom.has_center() && node == dom.center_node()) continue;  // zero already
            const int ring = dom.ring_of(node);
            const double r = dom.ring_radius(ring);
            int j;
            if (aligned) {
                j = dom.theta_index_of(node);
            } else {
                const auto x = dom.coord(node);
                const std::array<double, 3> dir{x[0] / r, x[1] / r, 0.0};
                j = g.nearest(dir);
            }
            std::vector<double> flat = g.value(j).flat();
            const double scale = std::pow(r / r_out, alpha);
            for (double& v : flat) v *= scale;
            out.set(node, QPoint(g.q(), g.n(), std::move(flat)));
        }
        return out;
    }
    if (dom.kind() != GridKind::Ball) throw DomainError("radial_extension: target must be a ball or polar grid");
    if (g.m() != dom.m()) throw ShapeError("radial_extension: sphere dimension must match the ball");
    QField out(target, g.q(), g.n());
    const double r_out = dom.outer_radius();
    for (int node = 0; node < dom.node_count(); ++node) {
        const auto x = dom.coord(node);
        double rho = 0.0;
        for (int k = 0; k < dom.m(); ++k) rho += x[k] * x[k];
        rho = std::sqrt(rho);
        if (rho == 0.0) continue;
        const std::array<double, 3> dir{x[0] / rho, x[1] / rho, x[2] / rho};
        std::vector<double> flat = g.value(g.nearest(dir)).flat();
        const double scale = std::pow(rho / r_out, alpha);
        for (double& v : flat) v *= scale;
        out.set(node, QPoint(g.q(), g.n(), std::move(flat)));
    }
    return out;
}

double radial_energy_closed_form(const SphereSamples& g, double alpha, double p, int m) {
    if (!(alpha > 0.0)) throw ParameterError("radial_energy_closed_form: alpha must be positive");
    if (m != g.m()) throw ShapeError("radial_energy_closed_form: m must match the sphere samples");
    const double denom = m - p + p * alpha;
    if (!(denom > 0.0)) throw ParameterError("radial_energy_closed_form: need m - p + p*alpha > 0");
    double integral = 0.0;
    for (int i = 0; i < g.count(); ++i) {
        const double term = alpha * alpha * norm2(g.value(i)) + g.tangential_density(i);
        integral += g.weight(i) * std::pow(term, p / 2.0);
    }
    return integral / denom;
}

double elementary_inequality_constant(double p) {
    if (!(p > 2.0)) throw ParameterError("elementary_inequality_constant: p > 2 required");
    const double q = p / 2.0;
    // C(p) = sup over t > 0 and delta in (0,1) of
    //   ((1+t)^q - 1 - delta) delta^{q-1} / t^q;
    // the delta maximizer is min(1, ((1+t)^q - 1)(q-1)/q), leaving a 1-D
    // search over t. A small safety factor covers the grid resolution.
    double best = 1.0;  // t -> infinity limit
    for (int ti = 0; ti <= 20000; ++ti) {
        const double t = std::pow(10.0, -12.0 + 24.0 * ti / 20000.0);
        const double a = std::pow(1.0 + t, q) - 1.0;
        const double delta = std::min(a * (q - 1.0) / q, 1.0);
        if (delta <= 0.0) continue;
        const double val = (a - delta) * std::pow(delta, q - 1.0) / std::pow(t, q);
        best = std::max(best, val);
    }
    return best * 1.01;
}

double m_bound(int m, double p, double big_m, double alpha, double delta, double c) {
    if (!(p > 1.0 && p <= m)) throw ParameterError("m_bound: need 1 < p <= m");
    if (!(alpha > 0.0)) throw ParameterError("m_bound: alpha must be positive");
    if (big_m < 0.0) throw ParameterError("m_bound: M must be nonnegative");
    const double cc = c > 0.0 ? c : (p <= 2.0 ? 1.0 : elementary_inequality_constant(p));
    const double denom = m - p + p * alpha;
    const double mp = 1.0 + std::pow(big_m, p);
    if (p <= 2.0) {
        return (1.0 + cc * mp * std::pow(alpha, p)) / denom;
    }
    if (!(delta > 0.0)) throw ParameterError("m_bound: delta must be positive for p > 2");
    return ((1.0 + delta) + cc * std::pow(delta, -(p / 2.0 - 1.0)) * mp * std::pow(alpha, p)) / denom;
}

GapCertificate find_gap(int m, double p, double big_m, double c) {
    if (!(p > 1.0 && p < m)) throw ParameterError("find_gap: need 1 < p < m");
    const double cc = c > 0.0 ? c : (p <= 2.0 ? 1.0 : elementary_inequality_constant(p));
    auto bound_at = [&](double alpha) {
        return m_bound(m, p, big_m, alpha, p > 2.0 ? alpha * alpha : 1.0, cc);
    };
    double lo = 1e-9, hi = 8.0;
    for (int it = 0; it < 240; ++it) {
        const double a1 = lo + (hi - lo) / 3.0;
        const double a2 = hi - (hi - lo) / 3.0;
        if (bound_at(a1) <= bound_at(a2)) {
            hi = a2;
        } else {
            lo = a1;
        }
    }
    GapCertificate cert;
    cert.m = m;
    cert.p = p;
    cert.big_m = big_m;
    cert.c = cc;
    cert.alpha0 = 0.5 * (lo + hi);
    cert.delta0 = p > 2.0 ? cert.alpha0 * cert.alpha0 : 0.0;
    cert.mval = bound_at(cert.alpha0);
    const double gap = 1.0 / (m - p) - cert.mval;
    if (!(gap > 0.0)) throw ConstructionError("find_gap: no positive gap found");
    cert.eta0 = gap / 2.0;
    cert.eps0 = (m - p) * cert.eta0;
    return cert;
}

namespace {

// Matched extension of coarse vertex means to the fine nodes of a 1-D or 2-D
// box grid. Vertices sit every `block` cells.
class SkeletonExtension {
  public:
    SkeletonExtension(std::vector<int> blocks, std::vector<std::vector<QPoint>> means)
        : blocks_(std::move(blocks)), means_(std::move(means)) {}

    QPoint at(std::span<const int> idx) const {
        if (blocks_.size() == 1) return line_value(idx[0]);
        return cell_value(idx[0], idx[1]);
    }

  private:
    QPoint line_value(int i) const {
        const int b = blocks_[0];
        const int cell = std::min(i / b, static_cast<int>(means_.size()) - 2);
        const double t = static_cast<double>(i - cell * b) / b;
        return matched_mix(means_[cell][0], means_[cell + 1][0], t);
    }

    QPoint cell_value(int i, int j) const {
        const int bi = blocks_[0], bj = blocks_[1];
        const int ci = std::min(i / bi, static_cast<int>(means_.size()) - 2);
        const int cj = std::min(j / bj, static_cast<int>(means_[0].size()) - 2);
        const double x = static_cast<double>(i - ci * bi) / bi;
        const double y = static_cast<double>(j - cj * bj) / bj;
        const QPoint& m00 = means_[ci][cj];
        const QPoint& m10 = means_[ci + 1][cj];
        const QPoint& m01 = means_[ci][cj + 1];
        const QPoint& m11 = means_[ci + 1][cj + 1];

        const auto sx0 = match_sheets(m00, m10);
        const auto sx1 = match_sheets(m01, m11);
        const auto sy0 = match_sheets(m00, m01);
        const auto sy1 = match_sheets(m10, m11);
        bool consistent = true;
        for (int s = 0; s < m00.q(); ++s) {
            if (sy1[sx0[s]] != sx1[sy0[s]]) {
                consistent = false;
                break;
            }
        }
        if (consistent) {
            std::vector<double> flat(m00.flat().size());
            const int q = m00.q(), n = m00.n();
            for (int s = 0; s < q; ++s) {
                auto a = m00.sheet(s);
                auto b = m10.sheet(sx0[s]);
                auto c = m01.sheet(sy0[s]);
                auto d = m11.sheet(sy1[sx0[s]]);
                for (int k = 0; k < n; ++k) {
                    flat[static_cast<std::size_t>(s) * n + k] =
                        (1 - x) * (1 - y) * a[k] + x * (1 - y) * b[k] + (1 - x) * y * c[k] + x * y * d[k];
                }
            }
            return QPoint(q, n, std::move(flat));
        }
        // incompatible vertex matchings around the cell: collapse toward the
        // cell mean, keeping the cell boundary intact
        const std::vector<QPoint> corners{m00, m10, m01, m11};
        const QPoint center = frechet_mean(corners);
        const double sx = std::abs(2 * x - 1), sy = std::abs(2 * y - 1);
        const double s = std::max(sx, sy);
        if (s == 0.0) return center;
        const double px = 0.5 + (x - 0.5) / s;
        const double py = 0.5 + (y - 0.5) / s;
        QPoint border = QPoint::zero(m00.q(), m00.n());
        if (py < 1e-12) {
            border = matched_mix(m00, m10, px);
        } else if (py > 1.0 - 1e-12) {
            border = matched_mix(m01, m11, px);
        } else if (px < 1e-12) {
            border = matched_mix(m00, m01, py);
        } else {
            border = matched_mix(m10, m11, py);
        }
        return matched_mix(center, border, s);
    }

    std::vector<int> blocks_;
    std::vector<std::vector<QPoint>> means_;
};

std::vector<int> box_multi_index(const GridDomain& g, int node) {
    std::vector<int> idx(g.m());
    int rem = node;
    for (int k = g.m() - 1; k >= 0; --k) {
        const int npts = static_cast<int>(std::lround((g.hi()[k] - g.lo()[k]) / g.step()[k])) + 1;
        idx[k] = rem % npts;
        rem /= npts;
    }
    return idx;
}

}  // namespace

std::pair<QField, InterpolationReport> slab_interpolate(const QField& g1, const QField& g2, double eps, double p) {
    const GridDomain& grid = g1.domain();
    if (grid.kind() != GridKind::Box) throw ShapeError("slab_interpolate: box grids only");
    if (g2.domain().kind() != GridKind::Box || g2.domain().node_count() != grid.node_count() ||
        g2.domain().m() != grid.m() || g1.q() != g2.q() || g1.n() != g2.n()) {
        throw ShapeError("slab_interpolate: g1 and g2 must share one grid and shape");
    }
    const int m = grid.m();
    if (m > m_p(p)) throw ParameterError("slab_interpolate: dimension exceeds m_p(p)");
    if (m > 2) throw ParameterError("slab_interpolate: m <= 2 supported");
    if (!(eps > 0.0)) throw ParameterError("slab_interpolate: eps must be positive");

    std::vector<int> blocks(m), ncells(m);
    for (int k = 0; k < m; ++k) {
        ncells[k] = static_cast<int>(std::lround((grid.hi()[k] - grid.lo()[k]) / grid.step()[k]));
        blocks[k] = closest_divisor(ncells[k], eps / grid.step()[k]);
    }

    auto vertex_means = [&](const QField& g) {
        const int vi = ncells[0] / blocks[0] + 1;
        const int vj = m == 2 ? ncells[1] / blocks[1] + 1 : 1;
        std::vector<std::vector<QPoint>> means(vi, std::vector<QPoint>(vj, QPoint::zero(g.q(), g.n())));
        for (int a = 0; a < vi; ++a) {
            for (int b = 0; b < vj; ++b) {
                std::vector<int> window;
                for (int node = 0; node < grid.node_count(); ++node) {
                    const auto idx = box_multi_index(grid, node);
                    if (std::abs(idx[0] - a * blocks[0]) > blocks[0]) continue;
                    if (m == 2 && std::abs(idx[1] - b * blocks[1]) > blocks[1]) continue;
                    window.push_back(node);
                }
                means[a][b] = mean_on(g, window);
            }
        }
        return means;
    };
    const SkeletonExtension ext1(blocks, vertex_means(g1));
    const SkeletonExtension ext2(blocks, vertex_means(g2));

    std::vector<double> lo(grid.lo()), hi(grid.hi());
    std::vector<int> cells(ncells);
    lo.push_back(-eps);
    hi.push_back(eps);
    const int nt = std::max(2, static_cast<int>(std::lround(2.0 * eps / grid.step()[0])));
    cells.push_back(nt);
    auto out_grid = std::make_shared<const GridDomain>(GridDomain::box(lo, hi, cells));

    QField h(out_grid, g1.q(), g1.n());
    for (int node = 0; node < out_grid->node_count(); ++node) {
        const auto idx = box_multi_index(*out_grid, node);
        const int layer = idx[m];
        int src = 0;
        for (int k = 0; k < m; ++k) src = src * (ncells[k] + 1) + idx[k];
        if (layer == nt) {
            h.set(node, g1.value(src));
        } else if (layer == 0) {
            h.set(node, g2.value(src));
        } else {
            const double s = static_cast<double>(layer) / nt;
            const QPoint top = ext1.at(std::span<const int>(idx.data(), m));
            const QPoint bottom = ext2.at(std::span<const int>(idx.data(), m));
            h.set(node, matched_mix(bottom, top, s));
        }
    }

    InterpolationReport rep;
    rep.p = p;
    rep.eps = eps;
    rep.energy = edge_energy(h, p);
    rep.boundary_energy_sum = edge_energy(g1, p) + edge_energy(g2, p);
    for (int node = 0; node < grid.node_count(); ++node) {
        rep.gap_integral += grid.measure(node) * std::pow(metric(g1.value(node), g2.value(node)), p);
    }
    rep.bound = eps * rep.boundary_energy_sum + std::pow(eps, 1.0 - p) * rep.gap_integral;
    rep.k_to_p = rep.boundary_energy_sum + std::pow(eps, -p) * rep.gap_integral;
    rep.achieved_constant = rep.bound > 0.0 ? rep.energy / rep.bound : 0.0;
    for (int node = 0; node < grid.node_count(); ++node) {
        auto idx = box_multi_index(grid, node);
        idx.push_back(nt);
        int top = 0, bot = 0;
        for (int k = 0; k <= m; ++k) {
            const int npts = (k < m ? ncells[k] : nt) + 1;
            top = top * npts + idx[k];
            bot = bot * npts + (k < m ? idx[k] : 0);
        }
        rep.trace_residual_first = std::max(rep.trace_residual_first, metric(h.value(top), g1.value(node)));
        rep.trace_residual_second = std::max(rep.trace_residual_second, metric(h.value(bot), g2.value(node)));
    }
    return {std::move(h), rep};
}

std::pair<QField, InterpolationReport> annulus_interpolate_2d(const SphereSamples& g1, const SphereSamples& g2,
                                                              double eps, double p) {
    if (g1.m() != 2 || g2.m() != 2) throw ShapeError("annulus_interpolate_2d: circle samples required");
    if (g1.count() != g2.count() || g1.q() != g2.q() || g1.n() != g2.n()) {
        throw ShapeError("annulus_interpolate_2d: mismatched circle resolutions");
    }
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("annulus_interpolate_2d: eps in (0,1)");
    const int ntheta = g1.count();
    const int narcs = std::max(4, closest_divisor(ntheta, kTwoPi / eps));
    const int arc_len = ntheta / narcs;

    // arc decomposition offset: minimize the 0-skeleton share of the
    // boundary-cell energy over all grid offsets
    int best_offset = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int o = 0; o < arc_len; ++o) {
        double cost = 0.0;
        for (int l = 0; l < narcs; ++l) {
            const int v = o + l * arc_len;
            cost += std::pow(g1.tangential_density(v), p / 2.0) + std::pow(g2.tangential_density(v), p / 2.0) +
                    std::pow(eps, -p) * std::pow(metric(g1.value(v), g2.value(v)), p);
        }
        if (cost < best_cost) {
            best_cost = cost;
            best_offset = o;
        }
    }

    auto arc_means = [&](const SphereSamples& g) {
        std::vector<QPoint> means(narcs, QPoint::zero(g.q(), g.n()));
        for (int l = 0; l < narcs; ++l) {
            const int v = best_offset + l * arc_len;
            std::vector<QPoint> window;
            for (int d = -arc_len; d <= arc_len; ++d) window.push_back(g.value(((v + d) % ntheta + ntheta) % ntheta));
            means[l] = frechet_mean(window);
        }
        return means;
    };
    const auto means1 = arc_means(g1);
    const auto means2 = arc_means(g2);

    auto extend = [&](const std::vector<QPoint>& means) {
        std::vector<QPoint> layer;
        layer.reserve(ntheta);
        for (int j = 0; j < ntheta; ++j) {
            const int rel = ((j - best_offset) % ntheta + ntheta) % ntheta;
            const int arc = rel / arc_len;
            const double t = static_cast<double>(rel - arc * arc_len) / arc_len;
            layer.push_back(matched_mix(means[arc], means[(arc + 1) % narcs], t));
        }
        return layer;
    };
    const auto layer1 = extend(means1);
    const auto layer2 = extend(means2);

    const int nr = std::max(2, static_cast<int>(std::lround(eps * ntheta / kTwoPi)));
    auto out_grid = std::make_shared<const GridDomain>(GridDomain::polar_annulus(nr, ntheta, 1.0 - eps, 1.0));
    QField h(out_grid, g1.q(), g1.n());
    const int rings = out_grid->ring_count();
    for (int ring = 1; ring <= rings; ++ring) {
        const double s = (out_grid->ring_radius(ring) - (1.0 - eps)) / eps;
        for (int j = 0; j < ntheta; ++j) {
            const int node = out_grid->node_at(ring, j);
            if (ring == rings) {
                h.set(node, g1.value(j));
            } else if (ring == 1) {
                h.set(node, g2.value(j));
            } else {
                h.set(node, matched_mix(layer2[j], layer1[j], s));
            }
        }
    }

    InterpolationReport rep;
    rep.p = p;
    rep.eps = eps;
    rep.energy = edge_energy(h, p);
    rep.boundary_energy_sum = g1.tangential_energy(p) + g2.tangential_energy(p);
    rep.gap_integral = g1.metric_p_integral(g2, p);
    rep.bound = eps * rep.boundary_energy_sum + std::pow(eps, 1.0 - p) * rep.gap_integral;
    rep.k_to_p = rep.boundary_energy_sum + std::pow(eps, -p) * rep.gap_integral;
    rep.achieved_constant = rep.bound > 0.0 ? rep.energy / rep.bound : 0.0;
    for (int j = 0; j < ntheta; ++j) {
        rep.trace_residual_first =
            std::max(rep.trace_residual_first, metric(h.value(out_grid->node_at(rings, j)), g1.value(j)));
        rep.trace_residual_second =
            std::max(rep.trace_residual_second, metric(h.value(out_grid->node_at(1, j)), g2.value(j)));
    }
    return {std::move(h), rep};
}

QField homogeneous0_extension(const SphereSamples& g, int cell_dim, double p, double radius, double h) {
    if (!(static_cast<double>(cell_dim) + 1.0 > p)) {
        throw ParameterError("homogeneous0_extension: need cell_dim + 1 > p (energy diverges)");
    }
    if (cell_dim + 1 != g.m()) throw ShapeError("homogeneous0_extension: sphere dimension mismatch");
    auto grid = std::make_shared<const GridDomain>(GridDomain::ball(cell_dim + 1, h, radius));
    QField out(grid, g.q(), g.n());
    for (int node = 0; node < grid->node_count(); ++node) {
        const auto x = grid->coord(node);
        double rho = 0.0;
        for (int k = 0; k < grid->m(); ++k) rho += x[k] * x[k];
        rho = std::sqrt(rho);
        if (rho == 0.0) {
            out.set(node, g.value(0));
            continue;
        }
        const std::array<double, 3> dir{x[0] / rho, x[1] / rho, x[2] / rho};
        out.set(node, g.value(g.nearest(dir)));
    }
    return out;
}

}  // namespace qvl
