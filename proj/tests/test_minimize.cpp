#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "qvl/errors.hpp"
#include "qvl/families.hpp"
#include "qvl/minimize.hpp"
#include "qvl/rng.hpp"

using namespace qvl;

namespace {
constexpr double kPi = std::numbers::pi;

std::shared_ptr<const GridDomain> make(GridDomain g) {
    return std::make_shared<const GridDomain>(std::move(g));
}

NodeValues boundary_from(const QField& f) { return trace(f); }
}  // namespace

TEST_CASE("dirichlet solve: constant boundary") {
    const auto disc = make(GridDomain::polar_disc(16, 32));
    const QPoint c = QPoint::from_rows({{0.4, -0.1}, {1.0, 0.2}});
    const QField cf = make_constant_field(disc, c);
    SolveOptions opts;
    opts.max_sweeps = 3000;
    const DirichletSolution sol = solve_dirichlet(disc, boundary_from(cf), opts);
    CHECK(sol.converged);
    CHECK(sol.final_energy <= 1e-9);
    for (int node = 0; node < disc->node_count(); ++node) {
        CHECK(metric(sol.field.value(node), c) <= 1e-4);
    }
}

TEST_CASE("dirichlet solve: harmonic oracle on the disc") {
    const auto disc = make(GridDomain::polar_disc(64, 128));
    const QField exact = make_harmonic_field(disc, 1);  // x1 = r cos(theta)
    SolveOptions opts;
    opts.max_sweeps = 8000;
    opts.tolerance = 1e-13;
    opts.relaxation = 1.85;
    const DirichletSolution sol = solve_dirichlet(disc, boundary_from(exact), opts);
    CHECK(sol.converged);

    // trace equals the boundary data bitwise
    for (int j = 0; j < disc->n_theta(); ++j) {
        const int node = disc->node_at(disc->ring_count(), j);
        CHECK(sol.field.value(node) == exact.value(node));
    }

    // sup distance to the exact harmonic and energy within 1% of pi
    double sup = 0.0;
    for (int node = 0; node < disc->node_count(); ++node) {
        sup = std::max(sup, metric(sol.field.value(node), exact.value(node)));
    }
    CHECK(sup <= 1e-3);
    CHECK(energy(sol.field, 2.0) == doctest::Approx(kPi).epsilon(0.01));

    // objective is nonincreasing across sweeps
    for (std::size_t i = 1; i < sol.energy_trace.size(); ++i) {
        CHECK(sol.energy_trace[i] <= sol.energy_trace[i - 1] * (1.0 + 1e-9) + 1e-300);
    }

    // deterministic given identical options
    const DirichletSolution again = solve_dirichlet(disc, boundary_from(exact), opts);
    CHECK(again.final_energy == sol.final_energy);
    CHECK(again.energy_trace == sol.energy_trace);
}

TEST_CASE("dirichlet solve: branch pair recovers the analytic energy") {
    const auto disc = make(GridDomain::polar_disc(48, 96));
    const QField pair = make_branch_pair_field(disc, 1);
    SolveOptions opts;
    opts.max_sweeps = 4000;
    opts.tolerance = 1e-12;
    opts.relaxation = 1.8;
    opts.restarts = 2;
    opts.seed = 11;
    const DirichletSolution sol = solve_dirichlet(disc, boundary_from(pair), opts);
    CHECK(sol.converged);
    // total energy 2 pi, interior D(r) = 2 pi r
    CHECK(sol.final_energy == doctest::Approx(2 * kPi).epsilon(0.05));
    const double r = snapped_radius(*disc, 0.5);
    CHECK(ball_energy(sol.field, std::vector<double>{0.0, 0.0}, 0.5, 2.0) == doctest::Approx(2 * kPi * r).epsilon(0.05));
}

TEST_CASE("dirichlet solve: general p on a segment is linear") {
    const auto line = make(GridDomain::box({-1.0}, {1.0}, {32}));
    QField bound(line, 1, 1);
    bound.set(0, QPoint(1, 1, {0.0}));
    bound.set(line->node_count() - 1, QPoint(1, 1, {1.0}));
    NodeValues bv;
    bv.nodes = {0, line->node_count() - 1};
    bv.values = {bound.value(0), bound.value(line->node_count() - 1)};
    SolveOptions opts;
    opts.p = 2.5;
    opts.max_sweeps = 3000;
    opts.tolerance = 1e-13;
    const DirichletSolution sol = solve_dirichlet(line, bv, opts);
    CHECK(sol.converged);
    for (int node = 0; node < line->node_count(); ++node) {
        const double x = line->coord(node)[0];
        CHECK(sol.field.value(node).sheet(0)[0] == doctest::Approx((x + 1.0) / 2.0).epsilon(1e-3).scale(1.0));
    }
}

TEST_CASE("dirichlet solve: missing boundary data") {
    const auto disc = make(GridDomain::polar_disc(8, 16));
    NodeValues incomplete;
    incomplete.nodes = {disc->node_at(disc->ring_count(), 0)};
    incomplete.values = {QPoint::zero(1, 1)};
    SolveOptions opts;
    CHECK_THROWS_AS(solve_dirichlet(disc, incomplete, opts), DomainError);
}

TEST_CASE("almost-minimality audit") {
    const auto disc = make(GridDomain::polar_disc(48, 96));
    const QField exact = make_harmonic_field(disc, 1);
    SolveOptions opts;
    opts.max_sweeps = 4000;
    opts.tolerance = 1e-12;
    opts.relaxation = 1.8;
    const DirichletSolution sol = solve_dirichlet(disc, boundary_from(exact), opts);

    const std::vector<BallSpec> balls = {{{0.0, 0.0}, 0.4}, {{0.0, 0.0}, 0.7}};
    SolveOptions audit = opts;
    audit.max_sweeps = 2000;
    const ModularFunction zero = [](double) { return 0.0; };

    const AlmostMinReport clean = verify_almost_min(sol.field, zero, balls, audit);
    CHECK(clean.worst_ratio <= 1.0 + 1e-4);

    // analytic sample: ratio within O(h) of 1
    const AlmostMinReport sampled = verify_almost_min(exact, zero, balls, audit);
    CHECK(sampled.worst_ratio <= 1.0 + 10.0 * disc->h());

    // interior noise must be detected
    QField noisy = sol.field;
    Rng rng(5);
    for (int node : disc->interior_nodes()) {
        std::vector<double> flat = noisy.value(node).flat();
        for (double& x : flat) x += rng.range(-0.1, 0.1);
        noisy.set(node, QPoint(1, 1, std::move(flat)));
    }
    const AlmostMinReport bad = verify_almost_min(noisy, zero, balls, audit);
    CHECK(bad.worst_ratio > 1.05);
}

TEST_CASE("radial comparison check") {
    const GapCertificate cert = find_gap(3, 2.0, 0.0, 1.0);

    // f = x1 on the m = 3 ball: closed forms (4/3) pi r^3 vs (8/3) pi r^2
    const auto ball = make(GridDomain::ball(3, 1.0 / 16.0));
    const QField fx = make_linear_field(ball, {{1.0, 0.0, 0.0}});
    const std::vector<BallSpec> balls = {{{0.0, 0.0, 0.0}, 0.5}, {{0.0, 0.0, 0.0}, 0.75}};
    const RadialComparisonReport rep = radial_comparison_check(fx, cert, balls);
    CHECK(rep.all_pass);
    for (const auto& row : rep.rows) {
        CHECK(row.ball_energy == doctest::Approx(4.0 / 3.0 * kPi * std::pow(row.radius, 3)).epsilon(0.06));
        CHECK(row.boundary_energy == doctest::Approx(8.0 / 3.0 * kPi * row.radius * row.radius).epsilon(0.06));
    }

    // constant field: 0 <= 0
    const QField cf = make_constant_field(ball, QPoint::from_rows({{0.2, 0.0, 1.0}}));
    const RadialComparisonReport crep = radial_comparison_check(cf, cert, balls);
    CHECK(crep.all_pass);

    // radial competitor v_alpha with a linear trace: the ratio of ball energy
    // to r * boundary energy matches (alpha^2 + 2) / (2 (1 + 2 alpha))
    SphereSamples gl = SphereSamples::lat_long(48, 96, 1, 1);
    for (int i = 0; i < gl.count(); ++i) gl.set_value(i, QPoint(1, 1, {gl.direction(i)[0]}));
    const QField va = radial_extension(gl, cert.alpha0, ball);
    const RadialComparisonReport vrep = radial_comparison_check(va, cert, std::vector<BallSpec>{{{0.0, 0.0, 0.0}, 0.75}});
    const double a = cert.alpha0;
    const double predicted = (a * a + 2.0) / (2.0 * (1.0 + 2.0 * a));
    const auto& row = vrep.rows.front();
    CHECK(row.ball_energy / (row.radius * row.boundary_energy) == doctest::Approx(predicted).epsilon(0.08));

    CHECK_THROWS_AS(radial_comparison_check(make_harmonic_field(make(GridDomain::polar_disc(8, 16)), 1), cert,
                                            std::vector<BallSpec>{{{0.0, 0.0}, 0.4}}),
                    ParameterError);
}

TEST_CASE("decay profile") {
    const auto disc = make(GridDomain::polar_disc(96, 192));

    // f = x1: E(r) = pi r^2, slope = m = 2
    const QField fx = make_harmonic_field(disc, 1);
    std::vector<double> radii;
    for (int i = 0; i < 10; ++i) radii.push_back(0.2 + 0.07 * i);
    const DecayReport rep = decay_profile(fx, std::vector<double>{0.0, 0.0}, radii, 2.0);
    CHECK_FALSE(rep.degenerate);
    CHECK(rep.slope == doctest::Approx(2.0).epsilon(0.02));
    CHECK(rep.eta_hat == doctest::Approx(2.0).epsilon(0.03));

    // branch pair: D(r) = 2 pi r, slope 1
    const QField pair = make_branch_pair_field(disc, 1);
    const DecayReport brep = decay_profile(pair, std::vector<double>{0.0, 0.0}, radii, 2.0);
    CHECK(brep.slope == doctest::Approx(1.0).epsilon(0.03));

    // constant: degenerate
    const QField cf = make_constant_field(disc, QPoint::zero(1, 1));
    CHECK(decay_profile(cf, std::vector<double>{0.0, 0.0}, radii, 2.0).degenerate);

    CHECK_THROWS_AS(decay_profile(fx, std::vector<double>{0.0, 0.0}, std::vector<double>{0.3, 0.5}, 2.0), ParameterError);
}

TEST_CASE("diagnostic constants") {
    const GapCertificate cert = find_gap(3, 2.0, 0.0, 1.0);
    const DiagnosticConstants d = diagnostic_constants(cert);
    CHECK(d.p_star == doctest::Approx(4.0));  // p = m - 1 = 2 falls in the fixed 2p branch
    CHECK(d.eta == doctest::Approx(cert.eta0 / cert.c));
    CHECK(d.big_m == doctest::Approx(std::pow(1.0 / (cert.eta0 * cert.eta0), 2.0)));
    CHECK(sobolev_exponent(2.0, 4) == doctest::Approx(6.0));
}

TEST_CASE("q=1 solver matches a direct linear solve") {
    // small disc: assemble the weighted-graph Laplacian and solve it by
    // Gaussian elimination, independently of the relaxation path
    const auto disc = make(GridDomain::polar_disc(8, 16));
    const QField exact = make_harmonic_field(disc, 2);
    SolveOptions opts;
    opts.max_sweeps = 60000;
    opts.tolerance = 1e-15;
    opts.relaxation = 1.5;
    const DirichletSolution sol = solve_dirichlet(disc, boundary_from(exact), opts);

    const auto interior = disc->interior_nodes();
    std::vector<int> index(disc->node_count(), -1);
    for (std::size_t i = 0; i < interior.size(); ++i) index[interior[i]] = static_cast<int>(i);
    const int n = static_cast<int>(interior.size());
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0), b(n, 0.0);
    for (const auto& e : disc->edges()) {
        const double c = e.weight / (e.len * e.len);
        const int ia = index[e.a], ib = index[e.b];
        if (ia >= 0) a[static_cast<std::size_t>(ia) * n + ia] += c;
        if (ib >= 0) a[static_cast<std::size_t>(ib) * n + ib] += c;
        if (ia >= 0 && ib >= 0) {
            a[static_cast<std::size_t>(ia) * n + ib] -= c;
            a[static_cast<std::size_t>(ib) * n + ia] -= c;
        } else if (ia >= 0) {
            b[ia] += c * exact.value(e.b).sheet(0)[0];
        } else if (ib >= 0) {
            b[ib] += c * exact.value(e.a).sheet(0)[0];
        }
    }
    // plain Gaussian elimination with partial pivoting
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row) {
            if (std::abs(a[static_cast<std::size_t>(row) * n + col]) >
                std::abs(a[static_cast<std::size_t>(pivot) * n + col])) {
                pivot = row;
            }
        }
        for (int k = 0; k < n; ++k) std::swap(a[static_cast<std::size_t>(col) * n + k], a[static_cast<std::size_t>(pivot) * n + k]);
        std::swap(b[col], b[pivot]);
        for (int row = col + 1; row < n; ++row) {
            const double f = a[static_cast<std::size_t>(row) * n + col] / a[static_cast<std::size_t>(col) * n + col];
            for (int k = col; k < n; ++k) a[static_cast<std::size_t>(row) * n + k] -= f * a[static_cast<std::size_t>(col) * n + k];
            b[row] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int row = n - 1; row >= 0; --row) {
        double s = b[row];
        for (int k = row + 1; k < n; ++k) s -= a[static_cast<std::size_t>(row) * n + k] * x[k];
        x[row] = s / a[static_cast<std::size_t>(row) * n + row];
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(sol.field.value(interior[i]).sheet(0)[0] - x[i]));
    }
    CHECK(worst <= 1e-6);
}
