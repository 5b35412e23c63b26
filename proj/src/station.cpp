#include "qvl/station.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qvl/errors.hpp"

namespace qvl {

namespace {

// smoothstep cutoff: 1 on [0, r0], 0 beyond r1, C^1 in between
double cutoff(double t, double r0, double r1) {
    if (t <= r0) return 1.0;
    if (t >= r1) return 0.0;
    const double u = (r1 - t) / (r1 - r0);
    return u * u * (3.0 - 2.0 * u);
}

double cutoff_prime(double t, double r0, double r1) {
    if (t <= r0 || t >= r1) return 0.0;
    const double u = (r1 - t) / (r1 - r0);
    return (6.0 * u - 6.0 * u * u) * (-1.0 / (r1 - r0));
}

// Cartesian-frame partials (row-major n x m per sheet) at a node; polar jets
// are rotated out of the (e_r, e_theta) frame.
std::vector<double> cartesian_partials(const QField& f, int node) {
    const GridDomain& g = f.domain();
    const MatchedJet jt = jet(f, node);
    const int q = f.q(), n = f.n(), m = g.m();
    std::vector<double> out(static_cast<std::size_t>(q) * n * m);
    if (!g.is_polar()) {
        for (int i = 0; i < q; ++i) {
            for (int k = 0; k < m; ++k) {
                auto part = jt.partial(i, k);
                for (int c = 0; c < n; ++c) out[(static_cast<std::size_t>(i) * n + c) * m + k] = part[c];
            }
        }
        return out;
    }
    const auto x = g.coord(node);
    const double r = std::hypot(x[0], x[1]);
    const double ct = x[0] / r, st = x[1] / r;
    for (int i = 0; i < q; ++i) {
        auto dr = jt.partial(i, 0);
        auto dth = jt.partial(i, 1);  // already arc-length scaled: (1/r) d/dtheta
        for (int c = 0; c < n; ++c) {
            out[(static_cast<std::size_t>(i) * n + c) * m + 0] = ct * dr[c] - st * dth[c];
            out[(static_cast<std::size_t>(i) * n + c) * m + 1] = st * dr[c] + ct * dth[c];
        }
    }
    return out;
}

bool is_center_node(const GridDomain& g, int node) {
    return g.is_polar() && g.has_center() && node == g.center_node();
}

}  // namespace

VectorFieldSpec radial_cutoff_field(int m, double r0, double r1) {
    if (!(0.0 < r0 && r0 < r1)) throw ParameterError("radial_cutoff_field: need 0 < r0 < r1");
    VectorFieldSpec spec;
    spec.value = [m, r0, r1](std::span<const double> x) {
        double t = 0.0;
        for (int k = 0; k < m; ++k) t += x[k] * x[k];
        t = std::sqrt(t);
        std::vector<double> out(m);
        const double chi = cutoff(t, r0, r1);
        for (int k = 0; k < m; ++k) out[k] = chi * x[k];
        return out;
    };
    spec.jacobian = [m, r0, r1](std::span<const double> x) {
        double t = 0.0;
        for (int k = 0; k < m; ++k) t += x[k] * x[k];
        t = std::sqrt(t);
        std::vector<double> out(static_cast<std::size_t>(m) * m, 0.0);
        const double chi = cutoff(t, r0, r1);
        const double dchi = cutoff_prime(t, r0, r1);
        for (int l = 0; l < m; ++l) {
            for (int k = 0; k < m; ++k) {
                out[static_cast<std::size_t>(l) * m + k] = (l == k ? chi : 0.0) + (t > 0 ? dchi * x[l] * x[k] / t : 0.0);
            }
        }
        return out;
    };
    return spec;
}

FiberFieldSpec radial_cutoff_fiber(int m, int n, double r0, double r1) {
    if (!(0.0 < r0 && r0 < r1)) throw ParameterError("radial_cutoff_fiber: need 0 < r0 < r1");
    FiberFieldSpec spec;
    spec.value = [m, r0, r1, n](std::span<const double> x, std::span<const double> y) {
        double t = 0.0;
        for (int k = 0; k < m; ++k) t += x[k] * x[k];
        const double chi = cutoff(std::sqrt(t), r0, r1);
        std::vector<double> out(n);
        for (int c = 0; c < n; ++c) out[c] = chi * y[c];
        return out;
    };
    spec.dx = [m, r0, r1, n](std::span<const double> x, std::span<const double> y) {
        double t = 0.0;
        for (int k = 0; k < m; ++k) t += x[k] * x[k];
        t = std::sqrt(t);
        const double dchi = cutoff_prime(t, r0, r1);
        std::vector<double> out(static_cast<std::size_t>(n) * m, 0.0);
        if (t > 0.0) {
            for (int c = 0; c < n; ++c) {
                for (int k = 0; k < m; ++k) out[static_cast<std::size_t>(c) * m + k] = dchi * y[c] * x[k] / t;
            }
        }
        return out;
    };
    spec.dy = [m, r0, r1, n](std::span<const double> x, std::span<const double>) {
        double t = 0.0;
        for (int k = 0; k < m; ++k) t += x[k] * x[k];
        const double chi = cutoff(std::sqrt(t), r0, r1);
        std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
        for (int c = 0; c < n; ++c) out[static_cast<std::size_t>(c) * n + c] = chi;
        return out;
    };
    return spec;
}

double squeeze_residual(const QField& f, const VectorFieldSpec& x_field) {
    const GridDomain& g = f.domain();
    const int q = f.q(), n = f.n(), m = g.m();
    for (int node : g.boundary_nodes()) {
        const auto x = g.coord(node);
        const auto val = x_field.value(std::span<const double>(x.data(), m));
        for (double v : val) {
            if (std::abs(v) > 1e-9) throw DomainError("squeeze_residual: X support touches the boundary");
        }
    }
    double total = 0.0;
    for (int node = 0; node < g.node_count(); ++node) {
        if (g.is_boundary(node) || is_center_node(g, node)) continue;
        const auto x = g.coord(node);
        const auto dx = x_field.jacobian(std::span<const double>(x.data(), m));
        const auto jets = cartesian_partials(f, node);
        double div = 0.0;
        for (int k = 0; k < m; ++k) div += dx[static_cast<std::size_t>(k) * m + k];
        double inner = 0.0, norm2 = 0.0;
        for (int i = 0; i < q; ++i) {
            for (int c = 0; c < n; ++c) {
                const double* row = jets.data() + (static_cast<std::size_t>(i) * n + c) * m;
                for (int k = 0; k < m; ++k) {
                    norm2 += row[k] * row[k];
                    double jdx = 0.0;
                    for (int l = 0; l < m; ++l) jdx += row[l] * dx[static_cast<std::size_t>(l) * m + k];
                    inner += row[k] * jdx;
                }
            }
        }
        total += g.measure(node) * (2.0 * inner - norm2 * div);
    }
    return total;
}

double squash_residual(const QField& f, const FiberFieldSpec& y_field) {
    const GridDomain& g = f.domain();
    const int q = f.q(), n = f.n(), m = g.m();
    for (int node : g.boundary_nodes()) {
        const auto x = g.coord(node);
        for (int i = 0; i < q; ++i) {
            auto sheet = f.value(node).sheet(i);
            const auto val = y_field.value(std::span<const double>(x.data(), m), sheet);
            for (double v : val) {
                if (std::abs(v) > 1e-9) throw DomainError("squash_residual: Y support touches the boundary");
            }
        }
    }
    double total = 0.0;
    for (int node = 0; node < g.node_count(); ++node) {
        if (g.is_boundary(node) || is_center_node(g, node)) continue;
        const auto x = g.coord(node);
        const auto jets = cartesian_partials(f, node);
        double acc = 0.0;
        for (int i = 0; i < q; ++i) {
            auto sheet = f.value(node).sheet(i);
            const auto dxy = y_field.dx(std::span<const double>(x.data(), m), sheet);
            const auto dyy = y_field.dy(std::span<const double>(x.data(), m), sheet);
            const double* ji = jets.data() + static_cast<std::size_t>(i) * n * m;
            for (int c = 0; c < n; ++c) {
                for (int k = 0; k < m; ++k) {
                    const double jck = ji[static_cast<std::size_t>(c) * m + k];
                    acc += jck * dxy[static_cast<std::size_t>(c) * m + k];
                    double dyj = 0.0;
                    for (int d = 0; d < n; ++d) {
                        dyj += dyy[static_cast<std::size_t>(c) * n + d] * ji[static_cast<std::size_t>(d) * m + k];
                    }
                    acc += jck * dyj;
                }
            }
        }
        total += g.measure(node) * acc;
    }
    return total;
}

double squash_identity_residual(const QField& f, std::span<const double> a, double r) {
    const double ball = ball_energy(f, a, r, 2.0);
    const SphereIntegrals si = sphere_integrals(f, a, r);
    return ball - si.radial_pair;
}

FrequencyProfile frequency_profile(const QField& f, std::span<const double> a, std::span<const double> radii) {
    const GridDomain& g = f.domain();
    FrequencyProfile profile;
    profile.m = g.m();
    profile.center.assign(a.begin(), a.end());
    const std::vector<double> density = jet_density(f, 2.0);

    double prev_r = -1.0;
    for (double r : radii) {
        const double rs = snapped_radius(g, r);
        if (rs == prev_r) continue;
        prev_r = rs;
        FrequencyEntry e;
        e.r = rs;
        e.d = ball_integral(f, density, a, rs);
        const SphereIntegrals si = sphere_integrals(f, a, rs);
        e.h = si.h2;
        e.radial_pair = si.radial_pair;
        e.radial_square = si.radial_square;
        e.theta = std::pow(rs, 2.0 - profile.m) * e.d;
        if (e.h > 0.0) {
            e.n = rs * e.d / e.h;
        } else {
            e.n = 0.0;
            if (ball_l2(f, a, rs) > 1e-24) profile.vanishing_violation = true;
        }
        profile.entries.push_back(e);
    }
    bool all_zero = true;
    for (const auto& e : profile.entries) all_zero = all_zero && e.h <= 0.0 && e.d <= 0.0;
    profile.degenerate = all_zero;

    profile.min_n_step = std::numeric_limits<double>::infinity();
    profile.min_theta_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < profile.entries.size(); ++i) {
        profile.min_n_step = std::min(profile.min_n_step, profile.entries[i].n - profile.entries[i - 1].n);
        profile.min_theta_step =
            std::min(profile.min_theta_step, profile.entries[i].theta - profile.entries[i - 1].theta);
    }
    for (std::size_t i = 1; i + 1 < profile.entries.size(); ++i) {
        auto& e = profile.entries[i];
        const auto& lo = profile.entries[i - 1];
        const auto& hi = profile.entries[i + 1];
        const double dr = hi.r - lo.r;
        const double hp = (hi.h - lo.h) / dr;
        const double h_target = (profile.m - 1) / e.r * e.h + 2.0 * e.d;
        e.h_prime_residual = std::abs(hp - h_target) / std::max({std::abs(hp), std::abs(h_target), 1e-300});
        const double tp = (hi.theta - lo.theta) / dr;
        const double t_target = 2.0 * std::pow(e.r, 2.0 - profile.m) * e.radial_square;
        e.theta_prime_residual = std::abs(tp - t_target) / std::max({std::abs(tp), std::abs(t_target), 1e-300});
        profile.max_h_residual = std::max(profile.max_h_residual, e.h_prime_residual);
        profile.max_theta_residual = std::max(profile.max_theta_residual, e.theta_prime_residual);
    }
    return profile;
}

FrequencyBoundsReport frequency_bounds_check(const FrequencyProfile& profile, double r0) {
    if (profile.entries.empty()) throw ParameterError("frequency_bounds_check: empty profile");
    FrequencyBoundsReport report;
    std::size_t ref = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < profile.entries.size(); ++i) {
        const double d = std::abs(profile.entries[i].r - r0);
        if (d < best) {
            best = d;
            ref = i;
        }
    }
    const FrequencyEntry& e0 = profile.entries[ref];
    report.r0 = e0.r;
    const int m = profile.m;
    report.skipped_density_bound = e0.n <= 0.0;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ref; ++i) {
        const FrequencyEntry& e = profile.entries[i];
        if (e.h <= 0.0) continue;
        FrequencyBoundsRow row;
        row.r = e.r;
        const double val = e.h / std::pow(e.r, m - 1);
        const double base = e0.h / std::pow(e0.r, m - 1);
        const double lower = std::pow(e.r / e0.r, 2.0 * e0.n) * base;
        const double upper = std::pow(e.r / e0.r, 2.0 * e.n) * base;
        row.h_lower_margin = (val - lower) / std::max(val, 1e-300);
        row.h_upper_margin = (upper - val) / std::max(val, 1e-300);
        report.worst_margin = std::min({report.worst_margin, row.h_lower_margin, row.h_upper_margin});
        if (!report.skipped_density_bound) {
            const double dval = e.d / std::pow(e.r, m - 2);
            const double dbound = std::pow(e.r / e0.r, 2.0 * e.n) * (e0.d / std::pow(e0.r, m - 2)) * (e.n / e0.n);
            row.d_margin = (dbound - dval) / std::max(dval, 1e-300);
            report.worst_margin = std::min(report.worst_margin, row.d_margin);
        }
        report.rows.push_back(row);
    }
    return report;
}

LinfBoundReport linf_bound_check(const QField& f, std::span<const double> a, double r0) {
    const GridDomain& g = f.domain();
    LinfBoundReport report;
    const auto inner = g.nodes_in_ball(a, snapped_radius(g, r0) * (1.0 + 1e-12));
    if (inner.empty()) throw DomainError("linf_bound_check: empty ball");
    for (int node : inner) {
        double h2 = 0.0;
        for (double v : f.value(node).flat()) h2 += v * v;
        report.sup_sq = std::max(report.sup_sq, h2);
    }
    report.mass3 = ball_l2(f, a, 3.0 * r0);
    report.c_hat = report.mass3 > 0.0 ? report.sup_sq * std::pow(r0, g.m()) / report.mass3 : 0.0;

    // continuity at a density branch point: oscillation about the single
    // point Q[[y]], y from the barycenter of the local mean
    const auto small = g.nodes_in_ball(a, std::max(snapped_radius(g, r0 / 4), g.h()) * (1.0 + 1e-12));
    const QPoint local_mean = mean_on(f, small.empty() ? inner : small);
    const std::vector<double> y = barycenter(local_mean);
    const QPoint qy = QPoint::splat(f.q(), y);
    for (double scale : {1.0, 0.5, 0.25}) {
        const auto nodes = g.nodes_in_ball(a, snapped_radius(g, scale * r0) * (1.0 + 1e-12));
        if (nodes.empty()) continue;
        double acc = 0.0, vol = 0.0;
        for (int node : nodes) {
            const double d = metric(f.value(node), qy);
            acc += g.measure(node) * d * d;
            vol += g.measure(node);
        }
        report.centered_oscillations.push_back(acc / vol);
    }
    return report;
}

VMOReport vmo_report(const QField& f, std::span<const std::vector<double>> centers, std::span<const double> radii,
                     int jmax) {
    if (radii.size() < 3) throw ParameterError("vmo_report: need at least 3 radii");
    const GridDomain& g = f.domain();
    VMOReport report;
    report.m = g.m();
    const std::vector<double> density = jet_density(f, 2.0);

    auto centered = [&](std::span<const double> c) {
        bool yes = g.is_polar();
        for (double v : c) yes = yes && std::abs(v) < 1e-12;
        return yes;
    };
    auto omega_at = [&](double r) {
        double omega = 0.0;
        for (const auto& c : centers) {
            if (!centered(c) && g.nodes_in_ball(c, r).empty()) continue;  // unresolvable here
            const double mu = ball_integral(f, density, c, r);
            omega = std::max(omega, std::pow(snapped_radius(g, r), 2.0 - report.m) * mu);
        }
        return omega;
    };

    for (double r : radii) {
        VMOEntry entry;
        entry.r = snapped_radius(g, r);
        entry.omega = omega_at(r);
        for (const auto& c : centers) {
            if (!centered(c) && g.nodes_in_ball(c, r).empty()) continue;
            entry.worst_oscillation = std::max(entry.worst_oscillation, mean_oscillation(f, c, r));
        }
        entry.oscillation_ratio = entry.omega > 0.0 ? entry.worst_oscillation / entry.omega : 0.0;
        report.worst_oscillation_ratio = std::max(report.worst_oscillation_ratio, entry.oscillation_ratio);
        report.entries.push_back(entry);
    }
    report.min_omega_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        report.min_omega_step = std::min(report.min_omega_step, report.entries[i].omega - report.entries[i - 1].omega);
    }

    // dyadic-squared contraction at the origin; violations below the local
    // discretization tolerance count as passes
    const std::vector<double> origin(g.m(), 0.0);
    std::vector<double> rho(jmax + 2), omega_rho(jmax + 2, -1.0);
    for (int j = 0; j <= jmax + 1; ++j) rho[j] = std::pow(2.0, -std::pow(2.0, j));
    auto relative_gap = [&](double r) {
        if (!g.is_polar()) return g.h() / r;
        const int ring = g.nearest_ring(r);
        const double here = g.ring_radius(ring);
        const double next = g.ring_radius(ring > 1 ? ring - 1 : 2);
        return std::abs(here - next) / here;
    };
    auto resolvable = [&](double r) {
        const double rs = snapped_radius(g, r);
        return std::abs(rs / r - 1.0) < 0.25 && relative_gap(r) < 0.2;
    };
    report.contraction_ok = true;
    double required_c = 0.0;
    for (int j = 0; j <= jmax; ++j) {
        if (!resolvable(rho[j]) || !resolvable(rho[j + 1])) break;
        VMOStep step;
        step.rho_j = snapped_radius(g, rho[j]);
        step.rho_j1 = snapped_radius(g, rho[j + 1]);
        const double dj = ball_integral(f, density, origin, rho[j]);
        const double dj1 = ball_integral(f, density, origin, rho[j + 1]);
        step.theta_j = std::pow(step.rho_j, 2.0 - report.m) * dj;
        step.theta_j1 = std::pow(step.rho_j1, 2.0 - report.m) * dj1;
        const double h = sphere_integrals(f, origin, rho[j]).h2;
        step.n_j = h > 0.0 ? step.rho_j * dj / h : 0.0;
        const double tol = 5.0 * std::max(relative_gap(rho[j]), relative_gap(rho[j + 1]));
        step.theta_halves = step.theta_j1 <= 0.5 * step.theta_j * (1.0 + tol);
        step.n_small = step.n_j < std::pow(2.0, -(j + 1));
        step.pass = step.theta_halves || step.n_small;
        report.contraction_ok = report.contraction_ok && step.pass;
        report.steps.push_back(step);

        if (omega_rho[j] < 0.0) omega_rho[j] = omega_at(rho[j]);
        if (omega_rho[j + 1] < 0.0) omega_rho[j + 1] = omega_at(rho[j + 1]);
        if (omega_rho[j + 1] > 0.5 * omega_rho[j]) {
            required_c = std::max(required_c, omega_rho[j + 1] * std::pow(2.0, j + 1));
        }
    }
    report.required_contraction_c = required_c;

    // log-decay fit over the dyadic radii
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int j = 0; j <= jmax + 1; ++j) {
        if (omega_rho[j] <= 0.0) continue;
        const double x = std::log(std::abs(std::log(rho[j])));
        const double y = std::log(omega_rho[j]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count >= 2) {
        const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        report.fit_alpha = -slope;
        report.fit_c = std::exp((sy - slope * sx) / count);
        report.better_than_log = report.fit_alpha > 1.0;
    }
    return report;
}

}  // namespace qvl
