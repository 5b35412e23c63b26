#include "qvl/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "qvl/assignment.hpp"
#include "qvl/rng.hpp"

namespace qvl {

namespace {

// Raw solver state: per-node sheet blocks without canonicalization, so the
// frozen per-edge matchings stay valid across relaxation updates.
struct Workspace {
    const GridDomain* grid = nullptr;
    int q = 0, n = 0;
    std::vector<double> vals;                // node * q * n
    std::vector<std::vector<int>> sigma;     // per edge, a-sheet -> b-sheet
    std::vector<std::vector<int>> inv;       // per edge, b-sheet -> a-sheet
    std::vector<char> is_free;
    std::vector<std::vector<int>> incident;  // node -> edge ids

    double* sheet(int node, int s) { return vals.data() + (static_cast<std::size_t>(node) * q + s) * n; }
    const double* sheet(int node, int s) const { return vals.data() + (static_cast<std::size_t>(node) * q + s) * n; }
};

Workspace make_workspace(const QField& f, std::span<const int> free_nodes) {
    Workspace w;
    w.grid = &f.domain();
    w.q = f.q();
    w.n = f.n();
    const int nodes = w.grid->node_count();
    w.vals.resize(static_cast<std::size_t>(nodes) * w.q * w.n);
    for (int node = 0; node < nodes; ++node) {
        std::copy_n(f.value(node).flat().data(), static_cast<std::size_t>(w.q) * w.n,
                    w.vals.data() + static_cast<std::size_t>(node) * w.q * w.n);
    }
    const auto& edges = w.grid->edges();
    w.sigma.assign(edges.size(), {});
    w.inv.assign(edges.size(), {});
    w.is_free.assign(nodes, 0);
    for (int node : free_nodes) w.is_free[node] = 1;
    w.incident.assign(nodes, {});
    for (std::size_t e = 0; e < edges.size(); ++e) {
        w.incident[edges[e].a].push_back(static_cast<int>(e));
        w.incident[edges[e].b].push_back(static_cast<int>(e));
    }
    return w;
}

// Refreshes the per-edge optimal matchings; returns how many changed.
// Q = 1 and Q = 2 take direct paths; this is the solver's hot loop.
int rematch_all(Workspace& w) {
    const auto& edges = w.grid->edges();
    int changed = 0;
    if (w.q == 1) {
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (w.sigma[e].empty()) {
                w.sigma[e] = {0};
                w.inv[e] = {0};
            }
        }
        return 0;
    }
    auto pair_cost = [&](int node_a, int i, int node_b, int j) {
        const double* a = w.sheet(node_a, i);
        const double* b = w.sheet(node_b, j);
        double s = 0.0;
        for (int c = 0; c < w.n; ++c) {
            const double d = a[c] - b[c];
            s += d * d;
        }
        return s;
    };
    std::vector<double> cost(static_cast<std::size_t>(w.q) * w.q);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        std::vector<int> sg;
        if (w.q == 2) {
            const double straight = pair_cost(edges[e].a, 0, edges[e].b, 0) + pair_cost(edges[e].a, 1, edges[e].b, 1);
            const double crossed = pair_cost(edges[e].a, 0, edges[e].b, 1) + pair_cost(edges[e].a, 1, edges[e].b, 0);
            sg = straight <= crossed ? std::vector<int>{0, 1} : std::vector<int>{1, 0};
        } else {
            for (int i = 0; i < w.q; ++i) {
                for (int j = 0; j < w.q; ++j) {
                    cost[i * static_cast<std::size_t>(w.q) + j] = pair_cost(edges[e].a, i, edges[e].b, j);
                }
            }
            sg = min_cost_assignment(cost, w.q);
        }
        if (sg != w.sigma[e]) ++changed;
        w.inv[e].assign(w.q, 0);
        for (int i = 0; i < w.q; ++i) w.inv[e][sg[i]] = i;
        w.sigma[e] = std::move(sg);
    }
    return changed;
}

// Objective under the frozen matchings; equals the edge energy of the field
// whenever the matchings are optimal.
double frozen_energy(const Workspace& w, double p) {
    const auto& edges = w.grid->edges();
    double total = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        double s2 = 0.0;
        for (int i = 0; i < w.q; ++i) {
            const double* a = w.sheet(edges[e].a, i);
            const double* b = w.sheet(edges[e].b, w.sigma[e][i]);
            for (int c = 0; c < w.n; ++c) {
                const double d = a[c] - b[c];
                s2 += d * d;
            }
        }
        total += edges[e].weight * std::pow(s2, p / 2.0) / std::pow(edges[e].len, p);
    }
    return total;
}

// p = 2 sweep: per-sheet weighted averaging with over-relaxation. Each node
// update lowers the frozen quadratic for 0 < omega < 2.
void relax_sweep_p2(Workspace& w, double omega) {
    const auto& edges = w.grid->edges();
    std::vector<double> num(w.n);
    for (int node = 0; node < w.grid->node_count(); ++node) {
        if (!w.is_free[node]) continue;
        for (int s = 0; s < w.q; ++s) {
            std::fill(num.begin(), num.end(), 0.0);
            double den = 0.0;
            for (int eid : w.incident[node]) {
                const auto& e = edges[eid];
                const bool fwd = e.a == node;
                const int other = fwd ? e.b : e.a;
                const int os = fwd ? w.sigma[eid][s] : w.inv[eid][s];
                const double c = e.weight / (e.len * e.len);
                const double* nb = w.sheet(other, os);
                for (int k = 0; k < w.n; ++k) num[k] += c * nb[k];
                den += c;
            }
            if (den <= 0.0) continue;
            double* v = w.sheet(node, s);
            for (int k = 0; k < w.n; ++k) v[k] += omega * (num[k] / den - v[k]);
        }
    }
}

double local_energy(const Workspace& w, int node, double p) {
    const auto& edges = w.grid->edges();
    double total = 0.0;
    for (int eid : w.incident[node]) {
        const auto& e = edges[eid];
        double s2 = 0.0;
        for (int i = 0; i < w.q; ++i) {
            const double* a = w.sheet(e.a, i);
            const double* b = w.sheet(e.b, w.sigma[eid][i]);
            for (int c = 0; c < w.n; ++c) {
                const double d = a[c] - b[c];
                s2 += d * d;
            }
        }
        total += e.weight * std::pow(s2, p / 2.0) / std::pow(e.len, p);
    }
    return total;
}

// General p sweep: per-node gradient steps with backtracking; never increases
// the local objective.
void relax_sweep_general(Workspace& w, double p, int steps) {
    const auto& edges = w.grid->edges();
    const std::size_t block = static_cast<std::size_t>(w.q) * w.n;
    std::vector<double> grad(block), backup(block);
    for (int node = 0; node < w.grid->node_count(); ++node) {
        if (!w.is_free[node]) continue;
        for (int step = 0; step < steps; ++step) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double curvature = 0.0;
            for (int eid : w.incident[node]) {
                const auto& e = edges[eid];
                const bool fwd = e.a == node;
                double s2 = 0.0;
                for (int i = 0; i < w.q; ++i) {
                    const double* a = w.sheet(e.a, i);
                    const double* b = w.sheet(e.b, w.sigma[eid][i]);
                    for (int c = 0; c < w.n; ++c) {
                        const double d = a[c] - b[c];
                        s2 += d * d;
                    }
                }
                const double coeff = e.weight / std::pow(e.len, p) * p * std::pow(std::max(s2, 1e-300), p / 2.0 - 1.0);
                curvature += coeff;
                for (int s = 0; s < w.q; ++s) {
                    const int os = fwd ? w.sigma[eid][s] : w.inv[eid][s];
                    const double* v = w.sheet(node, s);
                    const double* nb = w.sheet(fwd ? e.b : e.a, os);
                    for (int c = 0; c < w.n; ++c) grad[static_cast<std::size_t>(s) * w.n + c] += coeff * (v[c] - nb[c]);
                }
            }
            double gnorm2 = 0.0;
            for (double gg : grad) gnorm2 += gg * gg;
            if (gnorm2 == 0.0 || curvature == 0.0) break;
            std::copy_n(w.sheet(node, 0), block, backup.data());
            const double before = local_energy(w, node, p);
            double tau = 1.0 / curvature;
            bool improved = false;
            for (int bt = 0; bt < 12; ++bt) {
                double* base = w.sheet(node, 0);
                for (std::size_t k = 0; k < block; ++k) base[k] = backup[k] - tau * grad[k];
                if (local_energy(w, node, p) < before - 1e-16 * (1.0 + std::abs(before))) {
                    improved = true;
                    break;
                }
                tau *= 0.5;
            }
            if (!improved) {
                std::copy_n(backup.data(), block, w.sheet(node, 0));
                break;
            }
        }
    }
}

QField field_from_workspace(const Workspace& w, const QField& proto) {
    QField out(proto.domain_ptr(), w.q, w.n);
    for (int node = 0; node < w.grid->node_count(); ++node) {
        std::vector<double> flat(w.sheet(node, 0), w.sheet(node, 0) + static_cast<std::size_t>(w.q) * w.n);
        out.set(node, QPoint(w.q, w.n, std::move(flat)));
    }
    return out;
}

struct RelaxOutcome {
    std::vector<double> trace;
    std::vector<int> rematches;
    bool converged = false;
};

RelaxOutcome relax(QField& f, std::span<const int> free_nodes, const SolveOptions& opts) {
    Workspace w = make_workspace(f, free_nodes);
    RelaxOutcome out;
    rematch_all(w);
    double energy = frozen_energy(w, opts.p);
    const double initial_energy = energy;
    out.trace.push_back(energy);
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        int changed = 0;
        const bool rematched = sweep % std::max(1, opts.rematch_period) == 0;
        if (rematched) changed = rematch_all(w);
        if (opts.p == 2.0) {
            relax_sweep_p2(w, opts.relaxation);
        } else {
            relax_sweep_general(w, opts.p, opts.gradient_steps);
        }
        const double next = frozen_energy(w, opts.p);
        if (next > energy * (1.0 + 1e-9) + 1e-300) {
            throw ConstructionError("solver energy increased across a sweep");
        }
        out.trace.push_back(next);
        out.rematches.push_back(changed);
        // the absolute floor handles problems whose minimum energy is zero
        const bool small = energy - next <= opts.tolerance * (next + 1e-6 * initial_energy) + 1e-300;
        energy = next;
        if (small && rematched && changed == 0 && sweep > 1) {
            out.converged = true;
            break;
        }
    }
    rematch_all(w);
    f = field_from_workspace(w, f);
    return out;
}

}  // namespace

DirichletSolution solve_dirichlet(std::shared_ptr<const GridDomain> domain, const NodeValues& boundary,
                                  const SolveOptions& opts) {
    if (boundary.nodes.empty()) throw DomainError("solve_dirichlet: boundary data required");
    const int q = boundary.values.front().q(), n = boundary.values.front().n();
    std::map<int, const QPoint*> bmap;
    for (std::size_t i = 0; i < boundary.nodes.size(); ++i) bmap[boundary.nodes[i]] = &boundary.values[i];
    for (int node : domain->boundary_nodes()) {
        if (!bmap.count(node)) throw DomainError("solve_dirichlet: boundary node missing a value");
    }

    // initial field: radial 1-homogeneous extension of the outer trace on
    // polar discs, nearest-boundary copy otherwise
    QField init(domain, q, n);
    for (auto& [node, value] : bmap) init.set(node, *value);
    if (domain->kind() == GridKind::PolarDisc) {
        SphereSamples tr = SphereSamples::from_polar_trace(init);
        init = radial_extension(tr, 1.0, domain);
        for (auto& [node, value] : bmap) init.set(node, *value);
    } else {
        const auto bnodes = domain->boundary_nodes();
        for (int node = 0; node < domain->node_count(); ++node) {
            if (bmap.count(node)) continue;
            const auto x = domain->coord(node);
            int best = bnodes.front();
            double bestd = std::numeric_limits<double>::infinity();
            for (int b : bnodes) {
                const auto y = domain->coord(b);
                double d = 0.0;
                for (int k = 0; k < domain->m(); ++k) d += (x[k] - y[k]) * (x[k] - y[k]);
                if (d < bestd) {
                    bestd = d;
                    best = b;
                }
            }
            init.set(node, *bmap[best]);
        }
    }

    std::vector<int> free_nodes;
    for (int node = 0; node < domain->node_count(); ++node) {
        if (!bmap.count(node)) free_nodes.push_back(node);
    }

    std::optional<DirichletSolution> best;
    for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
        QField f = init;
        if (restart > 0) {
            Rng rng(opts.seed * 1000003ULL + static_cast<std::uint64_t>(restart));
            for (int node : free_nodes) {
                std::vector<double> flat = f.value(node).flat();
                for (double& x : flat) x += rng.range(-opts.noise_amplitude, opts.noise_amplitude);
                f.set(node, QPoint(q, n, std::move(flat)));
            }
        }
        RelaxOutcome outcome = relax(f, free_nodes, opts);
        DirichletSolution sol{std::move(f),
                              std::move(outcome.trace),
                              std::move(outcome.rematches),
                              0.0,
                              0,
                              restart,
                              outcome.converged};
        sol.final_energy = sol.energy_trace.back();
        sol.sweeps = static_cast<int>(sol.rematch_trace.size());
        if (!best || sol.final_energy < best->final_energy) best = std::move(sol);
    }
    if (!best->converged) {
        throw DirichletConvergenceError("solve_dirichlet: no restart converged within max_sweeps",
                                        best->energy_trace, best->field);
    }
    return std::move(*best);
}

AlmostMinReport verify_almost_min(const QField& u, const ModularFunction& omega, std::span<const BallSpec> balls,
                                  const SolveOptions& opts) {
    const GridDomain& g = u.domain();
    AlmostMinReport report;
    for (const BallSpec& ball : balls) {
        double center_norm = 0.0;
        for (double c : ball.center) center_norm += c * c;
        if (std::sqrt(center_norm) + ball.radius > g.outer_radius() * (1.0 + 1e-9)) {
            throw DomainError("verify_almost_min: ball exits the domain");
        }
        const auto region = g.nodes_in_ball(ball.center, snapped_radius(g, ball.radius) * (1.0 + 1e-12));
        if (region.empty()) throw DomainError("verify_almost_min: empty ball");
        std::vector<char> in(g.node_count(), 0);
        for (int node : region) in[node] = 1;
        std::vector<char> frontier(g.node_count(), 0);
        for (const auto& e : g.edges()) {
            if (in[e.a] != in[e.b]) frontier[in[e.a] ? e.a : e.b] = 1;
        }
        std::vector<int> free_nodes;
        for (int node : region) {
            if (!frontier[node] && !g.is_boundary(node)) free_nodes.push_back(node);
        }
        const double u_energy = edge_energy(u, region, opts.p);

        QField resolved = u;
        relax(resolved, free_nodes, opts);
        const double resolve_energy = edge_energy(resolved, region, opts.p);

        // radial competitor from the trace, centered polar balls only
        double radial_energy = -1.0;
        bool centered = g.is_polar();
        for (double c : ball.center) centered = centered && std::abs(c) < 1e-12;
        if (centered) {
            const int ring = g.nearest_ring(ball.radius);
            QField comp = u;
            const double rk = g.ring_radius(ring);
            for (int rr = 1; rr < ring; ++rr) {
                const double scale = g.ring_radius(rr) / rk;
                for (int j = 0; j < g.n_theta(); ++j) {
                    std::vector<double> flat = u.value(g.node_at(ring, j)).flat();
                    for (double& x : flat) x *= scale;
                    comp.set(g.node_at(rr, j), QPoint(u.q(), u.n(), std::move(flat)));
                }
            }
            if (g.has_center()) comp.set(g.center_node(), QPoint::zero(u.q(), u.n()));
            radial_energy = edge_energy(comp, region, opts.p);
        }

        AlmostMinRow row;
        row.center.assign(ball.center.begin(), ball.center.end());
        row.radius = snapped_radius(g, ball.radius);
        row.u_energy = u_energy;
        row.resolve_energy = resolve_energy;
        row.radial_energy = radial_energy;
        row.best_competitor = radial_energy >= 0.0 ? std::min(resolve_energy, radial_energy) : resolve_energy;
        const double allowance = (1.0 + omega(row.radius)) * row.best_competitor;
        row.ratio =
            allowance > 0.0 ? u_energy / allowance : (u_energy > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        report.worst_ratio = std::max(report.worst_ratio, row.ratio);
        report.rows.push_back(std::move(row));
    }
    return report;
}

RadialComparisonReport radial_comparison_check(const QField& u, const GapCertificate& cert,
                                               std::span<const BallSpec> balls) {
    const GridDomain& g = u.domain();
    if (!(cert.p < g.m())) throw ParameterError("radial_comparison_check: requires p < m");
    RadialComparisonReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (const BallSpec& ball : balls) {
        RadialComparisonRow row;
        row.center.assign(ball.center.begin(), ball.center.end());
        row.radius = snapped_radius(g, ball.radius);
        row.ball_energy = ball_energy(u, ball.center, ball.radius, cert.p);
        row.boundary_energy = boundary_tangential_energy(u, ball.center, ball.radius, cert.p);
        row.rhs = (1.0 / (g.m() - cert.p) - cert.eta0) * row.radius * row.boundary_energy;
        row.margin = row.rhs - row.ball_energy;
        row.pass = row.ball_energy <= row.rhs * (1.0 + 1e-9);
        report.worst_margin = std::min(report.worst_margin, row.margin);
        report.all_pass = report.all_pass && row.pass;
        report.rows.push_back(std::move(row));
    }
    return report;
}

DecayReport decay_profile(const QField& u, std::span<const double> center, std::span<const double> radii, double p) {
    if (radii.size() < 3) throw ParameterError("decay_profile: need at least 3 radii");
    const GridDomain& g = u.domain();
    DecayReport report;
    report.center.assign(center.begin(), center.end());
    report.p = p;
    double prev_r = 0.0;
    for (double r : radii) {
        DecayRow row;
        row.radius = snapped_radius(g, r);
        if (row.radius <= prev_r) throw ParameterError("decay_profile: radii must be strictly increasing");
        prev_r = row.radius;
        row.ball_energy = ball_energy(u, center, r, p);
        row.boundary_term = row.radius * boundary_tangential_energy(u, center, r, p);
        row.ratio = row.boundary_term > 0.0 ? row.ball_energy / row.boundary_term : 0.0;
        report.rows.push_back(row);
    }
    report.degenerate = true;
    for (const auto& row : report.rows) report.degenerate = report.degenerate && row.ball_energy <= 0.0;
    if (report.degenerate) return report;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (const auto& row : report.rows) {
        if (row.ball_energy <= 0.0) continue;
        const double x = std::log(row.radius), y = std::log(row.ball_energy);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    report.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    const double intercept = (sy - report.slope * sx) / count;
    for (const auto& row : report.rows) {
        if (row.ball_energy <= 0.0) continue;
        report.fit_residual = std::max(
            report.fit_residual, std::abs(std::log(row.ball_energy) - (report.slope * std::log(row.radius) + intercept)));
    }
    report.eta_hat = report.slope - (g.m() - p);

    report.min_normalized_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const double a = report.rows[i - 1].ball_energy / std::pow(report.rows[i - 1].radius, g.m() - p + report.eta_hat);
        const double b = report.rows[i].ball_energy / std::pow(report.rows[i].radius, g.m() - p + report.eta_hat);
        report.min_normalized_step = std::min(report.min_normalized_step, b - a);
    }
    return report;
}

double sobolev_exponent(double p, int m) {
    if (p < m - 1) return (m - 1) * p / (m - 1 - p);
    return 2.0 * p;  // any exponent above p works; fixed for determinism
}

DiagnosticConstants diagnostic_constants(const GapCertificate& cert) {
    DiagnosticConstants out;
    out.p_star = sobolev_exponent(cert.p, cert.m);
    out.eta = cert.eta0 / cert.c;
    out.big_m = std::pow(cert.c * cert.c / (cert.eta0 * cert.eta0), out.p_star / (out.p_star - cert.p));
    return out;
}

}  // namespace qvl
