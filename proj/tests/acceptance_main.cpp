// Acceptance suite: one check per release criterion, one pass/fail line each.
// Tolerances are pinned here; the process exits nonzero if any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qvl/competitor.hpp"
#include "qvl/families.hpp"
#include "qvl/minimize.hpp"
#include "qvl/qfield.hpp"
#include "qvl/rng.hpp"
#include "qvl/scenario.hpp"
#include "qvl/station.hpp"
#include "support/oracles.hpp"

using namespace qvl;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string details;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!details.empty()) details += "; ";
            details += "FAILED " + what;
        }
    }
    void note(const std::string& text) {
        if (!details.empty()) details += "; ";
        details += text;
    }
};

std::shared_ptr<const GridDomain> make(GridDomain g) {
    return std::make_shared<const GridDomain>(std::move(g));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. assignment metric vs exhaustive minimum; triangle inequality
Outcome criterion_metric() {
    Outcome out;
    Rng rng(10001);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const int q = rng.integer(1, 6), n = rng.integer(1, 4);
        const QPoint u = oracle::random_qpoint(rng, q, n);
        const QPoint v = oracle::random_qpoint(rng, q, n);
        const double fast = metric(u, v);
        const double slow = oracle::exhaustive_metric(u, v);
        worst = std::max(worst, std::abs(fast - slow) / (1.0 + slow));
    }
    out.require(worst <= 1e-12, "assignment metric equals exhaustive minimum (worst " + fmt(worst) + ")");

    double worst_triangle = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const int q = rng.integer(1, 5), n = rng.integer(1, 4);
        const QPoint u = oracle::random_qpoint(rng, q, n);
        const QPoint v = oracle::random_qpoint(rng, q, n);
        const QPoint w = oracle::random_qpoint(rng, q, n);
        worst_triangle = std::max(worst_triangle,
                                  (metric(u, w) - metric(u, v) - metric(v, w)) / (1.0 + metric(u, v) + metric(v, w)));
    }
    out.require(worst_triangle <= 1e-9, "triangle inequality (worst " + fmt(worst_triangle) + ")");
    out.note("max deviation " + fmt(worst));
    return out;
}

// ---------------------------------------------------------------------------
// 2. retraction: 1-Lipschitz, identity inside, constant outside
Outcome criterion_retraction() {
    Outcome out;
    Rng rng(20002);
    double worst_lip = 0.0, worst_range = 0.0;
    int identity_misses = 0, constant_misses = 0, done = 0;
    while (done < 10000) {
        const int q = rng.integer(2, 4), n = rng.integer(1, 3);
        const QPoint v = oracle::random_qpoint(rng, q, n);
        const double s = splitting(v);
        if (!std::isfinite(s)) continue;
        ++done;
        const double r = s / 4.0 * rng.range(0.1, 0.95);
        auto perturb = [&](double scale) {
            std::vector<double> flat = v.flat();
            for (double& x : flat) x += rng.range(-scale, scale);
            return QPoint(q, n, std::move(flat));
        };
        const QPoint u1 = perturb(rng.range(0.0, 3.0 * r));
        const QPoint u2 = perturb(rng.range(0.0, 3.0 * r));
        const QPoint w1 = retraction(v, r, u1);
        const QPoint w2 = retraction(v, r, u2);
        const double rhs = metric(u1, u2);
        worst_lip = std::max(worst_lip, metric(w1, w2) - rhs * (1.0 + 1e-12));
        worst_range = std::max(worst_range, metric(w1, v) - r * (1.0 + 1e-12));
        if (metric(u1, v) <= r && !(w1 == u1)) ++identity_misses;
        if (metric(u1, v) >= 2 * r && !(w1 == v)) ++constant_misses;
    }
    out.require(worst_lip <= 0.0, "Lipschitz contraction (worst excess " + fmt(worst_lip) + ")");
    out.require(worst_range <= 0.0, "range inside the closed ball");
    out.require(identity_misses == 0, "identity on the inner ball");
    out.require(constant_misses == 0, "constant outside the double ball");
    return out;
}

// ---------------------------------------------------------------------------
// 3. separation postconditions with log-space beta
Outcome criterion_separation() {
    Outcome out;
    Rng rng(30003);
    int failures = 0, done = 0;
    while (done < 1000) {
        const int q = rng.integer(2, 5), n = rng.integer(1, 3);
        const QPoint p = (done % 2 == 0) ? oracle::random_qpoint(rng, q, n) : oracle::random_clustered_qpoint(rng, q, n);
        if (std::isinf(splitting(p))) continue;
        ++done;
        for (double eps : {1.0 / 16.0, 1.0 / 9.0}) {
            try {
                const QPoint sep = separate(p, eps);
                const double s = splitting(sep);
                const LogValue b = beta(eps, q);
                const bool cond1 = std::isfinite(s) && std::log(s) >= b.log_value + std::log(diameter(p)) - 1e-12;
                const bool cond2 = metric(sep, p) <= eps * s * (1.0 + 1e-12);
                if (!cond1 || !cond2) ++failures;
            } catch (const std::exception&) {
                ++failures;
            }
        }
    }
    out.require(failures == 0, "separation postconditions (" + std::to_string(failures) + " failures)");
    return out;
}

// ---------------------------------------------------------------------------
// 4. radial competitor energy vs closed form
Outcome criterion_radial_energy() {
    Outcome out;
    // m = 2 disc, g = cos(theta), refinement h in {1/16, 1/32, 1/64}
    for (double alpha : {0.5, 1.0, 2.0}) {
        std::vector<double> errs;
        for (int nr : {16, 32, 64}) {
            const auto disc = make(GridDomain::polar_disc(nr, 4 * nr));
            SphereSamples g = SphereSamples::circle(4 * nr, 1, 1);
            for (int j = 0; j < 4 * nr; ++j) g.set_value(j, QPoint(1, 1, {g.direction(j)[0]}));
            const double closed = radial_energy_closed_form(g, alpha, 2.0, 2);
            const double discrete = energy(radial_extension(g, alpha, disc), 2.0);
            errs.push_back(std::abs(discrete / closed - 1.0));
        }
        out.require(errs.back() <= 0.02, "m=2 alpha=" + fmt(alpha) + " within 2% at h=1/64 (err " + fmt(errs.back()) + ")");
        out.require(errs[2] <= errs[0] + 1e-3, "m=2 alpha=" + fmt(alpha) + " ratio improves under refinement");
    }
    // m = 3, constant boundary data
    SphereSamples g3 = SphereSamples::lat_long(48, 96, 1, 1);
    for (int i = 0; i < g3.count(); ++i) g3.set_value(i, QPoint(1, 1, {1.2}));
    const auto ball = make(GridDomain::ball(3, 1.0 / 24.0));
    for (double alpha : {0.5, 1.0, 2.0}) {
        const double closed = alpha * alpha * 1.44 * 4.0 * kPi / (1.0 + 2.0 * alpha);
        const double discrete = energy(radial_extension(g3, alpha, ball), 2.0);
        const double err = std::abs(discrete / closed - 1.0);
        out.require(err <= 0.03, "m=3 alpha=" + fmt(alpha) + " within 3% (err " + fmt(err) + ")");
    }
    return out;
}

// ---------------------------------------------------------------------------
// 5. gap certificate: positivity, reproducibility, monotonicity in M
Outcome criterion_gap() {
    Outcome out;
    const GapCertificate cert = find_gap(3, 2.0, 0.0, 1.0);
    const GapCertificate again = find_gap(3, 2.0, 0.0, 1.0);
    out.require(cert.eta0 > 0.0, "positive gap");
    out.require(cert.mval <= 1.0 / (3 - 2) - 2.0 * cert.eta0 + 1e-15, "bound inequality");
    out.require(cert.alpha0 == again.alpha0 && cert.eta0 == again.eta0 && cert.mval == again.mval,
                "bit-reproducible certificate");
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (double big_m : {0.0, 1.0, 10.0}) {
        const double eta = find_gap(3, 2.0, big_m, 1.0).eta0;
        monotone = monotone && eta <= prev + 1e-15 && eta > 0.0;
        prev = eta;
    }
    out.require(monotone, "eta0 nonincreasing in M");
    out.note("eta0 " + fmt(cert.eta0) + " at alpha0 " + fmt(cert.alpha0));
    return out;
}

// ---------------------------------------------------------------------------
// 6. Dirichlet solver vs the exact harmonic x1 on a 65 x 65 polar grid
Outcome criterion_solver_q1() {
    Outcome out;
    const auto disc = make(GridDomain::polar_disc(64, 65));  // 65 radial nodes (center + rings) x 65 angles
    const QField exact = make_harmonic_field(disc, 1);
    SolveOptions opts;
    opts.max_sweeps = 20000;
    opts.tolerance = 1e-13;
    opts.relaxation = 1.85;
    const DirichletSolution sol = solve_dirichlet(disc, trace(exact), opts);
    double sup = 0.0;
    for (int node = 0; node < disc->node_count(); ++node) {
        sup = std::max(sup, metric(sol.field.value(node), exact.value(node)));
    }
    const double e = energy(sol.field, 2.0);
    out.require(sol.converged, "solver converged");
    out.require(sup <= 1e-3, "sup distance to the exact harmonic (" + fmt(sup) + ")");
    out.require(std::abs(e - kPi) <= 0.01 * kPi, "energy within 1% of pi (" + fmt(e) + ")");
    out.note("sup " + fmt(sup) + ", energy " + fmt(e));
    return out;
}

// ---------------------------------------------------------------------------
// 7. branch-pair minimizer: D(r) near 2 pi r and N near 1/2
Outcome criterion_branch_pair() {
    Outcome out;
    const auto disc = make(GridDomain::polar_disc(128, 256));
    const QField pair = make_branch_pair_field(disc, 1);
    SolveOptions opts;
    opts.max_sweeps = 20000;
    opts.tolerance = 1e-11;
    opts.relaxation = 1.95;
    opts.restarts = 2;
    opts.seed = 77;
    const DirichletSolution sol = solve_dirichlet(disc, trace(pair), opts);
    out.require(sol.converged, "solver converged");

    const std::vector<double> density = jet_density(sol.field, 2.0);
    const std::vector<double> origin{0.0, 0.0};
    double worst_d = 0.0, worst_n = 0.0;
    for (double r = 0.25; r <= 0.751; r += 0.0625) {
        const double rs = snapped_radius(*disc, r);
        const double d = ball_integral(sol.field, density, origin, r);
        worst_d = std::max(worst_d, std::abs(d / (2.0 * kPi * rs) - 1.0));
        const double h2 = sphere_integrals(sol.field, origin, r).h2;
        const double n = rs * d / h2;
        worst_n = std::max(worst_n, std::abs(n - 0.5));
    }
    out.require(worst_d <= 0.05, "D(r) within 5% of 2 pi r (worst " + fmt(worst_d) + ")");
    out.require(worst_n <= 0.05, "N(r) within [0.45, 0.55] (worst offset " + fmt(worst_n) + ")");
    return out;
}

// ---------------------------------------------------------------------------
// 8. frequency monotonicity and the H' identity on analytic samples
Outcome criterion_frequency() {
    Outcome out;
    const auto disc = make(GridDomain::polar_disc(256, 512));
    const double h = disc->h();
    std::vector<double> radii;
    for (int ring = 52; ring <= 230; ++ring) radii.push_back(disc->ring_radius(ring));
    const std::vector<double> origin{0.0, 0.0};

    for (int k = 1; k <= 3; ++k) {
        const QField f = make_harmonic_field(disc, k);
        const FrequencyProfile prof = frequency_profile(f, origin, radii);
        out.require(prof.min_n_step >= -5.0 * h, "degree " + std::to_string(k) + " N monotone");
        out.require(prof.min_theta_step >= -5.0 * h, "degree " + std::to_string(k) + " Theta monotone");
        out.require(prof.max_h_residual <= 5.0 * h, "degree " + std::to_string(k) + " H' identity");
        double worst_n = 0.0;
        for (const auto& e : prof.entries) worst_n = std::max(worst_n, std::abs(e.n - k) / k);
        out.require(worst_n <= 0.02, "degree " + std::to_string(k) + " N within 2% (worst " + fmt(worst_n) + ")");
    }
    const QField pair = make_branch_pair_field(disc, 1);
    const FrequencyProfile prof = frequency_profile(pair, origin, radii);
    out.require(prof.min_n_step >= -5.0 * h, "branch pair N monotone");
    out.require(prof.min_theta_step >= -5.0 * h, "branch pair Theta monotone");
    out.require(prof.max_h_residual <= 5.0 * h, "branch pair H' identity (worst " + fmt(prof.max_h_residual) + ")");
    double worst_n = 0.0;
    for (const auto& e : prof.entries) worst_n = std::max(worst_n, std::abs(e.n - 0.5) / 0.5);
    out.require(worst_n <= 0.02, "branch pair N within 2% of 1/2 (worst " + fmt(worst_n) + ")");
    return out;
}

// ---------------------------------------------------------------------------
// 9. squash identity and variation residuals: O(h), stable C, perturbation
Outcome criterion_stationarity() {
    Outcome out;
    const std::vector<double> origin{0.0, 0.0};
    double coarse_c = 0.0;
    double baseline = 0.0;
    double coarse_h = 0.0;
    for (int level = 0; level < 2; ++level) {
        const int nr = level == 0 ? 128 : 256;
        const auto disc = make(GridDomain::polar_disc(nr, 2 * nr));
        const double h = disc->h();
        const VectorFieldSpec xf = radial_cutoff_field(2, 0.45, 0.85);
        const FiberFieldSpec y1 = radial_cutoff_fiber(2, 1, 0.45, 0.85);
        const FiberFieldSpec y2 = radial_cutoff_fiber(2, 2, 0.45, 0.85);

        double worst = 0.0;
        const QField fx = make_harmonic_field(disc, 1);
        worst = std::max(worst, std::abs(squeeze_residual(fx, xf)));
        worst = std::max(worst, std::abs(squash_residual(fx, y1)));
        worst = std::max(worst, std::abs(squash_identity_residual(fx, origin, 0.5)));
        const QField pair = make_branch_pair_field(disc, 1);
        worst = std::max(worst, std::abs(squeeze_residual(pair, xf)));
        worst = std::max(worst, std::abs(squash_residual(pair, y2)));
        worst = std::max(worst, std::abs(squash_identity_residual(pair, origin, 0.5)));

        const double c_emp = worst / h;
        if (level == 0) {
            coarse_c = c_emp;
            coarse_h = h;
            baseline = worst;
            out.note("empirical C " + fmt(c_emp) + " at h " + fmt(h));
        } else {
            out.require(c_emp <= std::max(1.3 * coarse_c, 1e-6), "residual constant stable under refinement (C " +
                                                                     fmt(coarse_c) + " -> " + fmt(c_emp) + ")");
        }
    }
    // injected non-stationary perturbation, amplitude 0.1
    {
        const auto disc = make(GridDomain::polar_disc(128, 256));
        const VectorFieldSpec xf = radial_cutoff_field(2, 0.45, 0.85);
        Rng rng(99);
        QField noisy = make_harmonic_field(disc, 1);
        for (int node : disc->interior_nodes()) {
            std::vector<double> flat = noisy.value(node).flat();
            for (double& v : flat) v += rng.range(-0.1, 0.1);
            noisy.set(node, QPoint(1, 1, std::move(flat)));
        }
        const double perturbed = std::abs(squeeze_residual(noisy, xf));
        out.require(perturbed >= 10.0 * std::max(baseline, 1e-12),
                    "perturbed residual at least 10x the stationary baseline (" + fmt(perturbed) + " vs " +
                        fmt(baseline) + ")");
    }
    (void)coarse_h;
    return out;
}

// ---------------------------------------------------------------------------
// 10. integrated frequency bounds
Outcome criterion_frequency_bounds() {
    Outcome out;
    const auto disc = make(GridDomain::polar_disc(256, 512));
    const double h = disc->h();
    std::vector<double> radii;
    for (int i = 0; i < 24; ++i) radii.push_back(0.2 + 0.6 * i / 23.0);
    const std::vector<double> origin{0.0, 0.0};

    auto check_field = [&](const QField& f, const std::string& label, bool homogeneous) {
        const FrequencyProfile prof = frequency_profile(f, origin, radii);
        const FrequencyBoundsReport rep = frequency_bounds_check(prof, radii.back());
        out.require(rep.worst_margin >= -5.0 * h, label + " margins (worst " + fmt(rep.worst_margin) + ")");
        if (homogeneous) {
            double worst_eq = 0.0;
            for (const auto& row : rep.rows) {
                worst_eq = std::max({worst_eq, std::abs(row.h_lower_margin), std::abs(row.h_upper_margin),
                                     std::abs(row.d_margin)});
            }
            out.require(worst_eq <= 0.01, label + " homogeneous equality within 1% (worst " + fmt(worst_eq) + ")");
        }
    };
    for (int k = 1; k <= 3; ++k) check_field(make_harmonic_field(disc, k), "degree " + std::to_string(k), true);
    check_field(make_branch_pair_field(disc, 1), "branch pair", true);
    return out;
}

// ---------------------------------------------------------------------------
// 11. VMO modulus and the dyadic-squared contraction dichotomy
Outcome criterion_vmo() {
    Outcome out;
    // geometric radial grid resolving 2^-32
    const int octaves = 33, per_octave = 24;
    const auto geo = make(GridDomain::polar_disc_geometric(octaves * per_octave, 256, std::pow(2.0, -33.0)));
    const QField pair = make_branch_pair_field(geo, 1);
    const std::vector<std::vector<double>> centers = {{0.0, 0.0}, {0.25, 0.0}, {0.0, -0.3}};
    std::vector<double> radii;
    for (int i = 1; i <= 10; ++i) radii.push_back(0.05 * i);
    const VMOReport rep = vmo_report(pair, centers, radii, 4);

    out.require(rep.min_omega_step >= -1e-9, "omega nondecreasing (min step " + fmt(rep.min_omega_step) + ")");
    out.require(rep.entries.front().omega < 0.25 * rep.entries.back().omega, "omega decays toward zero");
    out.require(static_cast<int>(rep.steps.size()) >= 5, "all five dyadic steps resolvable (" +
                                                             std::to_string(rep.steps.size()) + ")");
    out.require(rep.contraction_ok, "contraction dichotomy at every step");
    out.require(rep.worst_oscillation_ratio > 0.0 && rep.worst_oscillation_ratio <= 5.0,
                "mean oscillation within an empirical multiple of omega (ratio " + fmt(rep.worst_oscillation_ratio) +
                    ")");
    out.note("oscillation/omega " + fmt(rep.worst_oscillation_ratio) + ", fit alpha " + fmt(rep.fit_alpha));
    return out;
}

// ---------------------------------------------------------------------------
// 12. interpolation bounds: exact traces, stable constant, closed form
Outcome criterion_interpolation() {
    Outcome out;
    const auto line = make(GridDomain::box({-1.0}, {1.0}, {64}));
    const double eps = 0.25;
    Rng rng(120012);
    std::vector<double> ratios;
    double worst_trace = 0.0;
    for (int d = 0; d < 20; ++d) {
        auto smooth = [&](double phase1, double phase2, double offset) {
            return sample_field(line, 2, 1, [&](const std::array<double, 3>& x) {
                const double base = 0.8 * std::sin(kPi * x[0] + phase1) + 0.24 * std::sin(2.0 * kPi * x[0] + phase2);
                return QPoint::from_rows({{2.0 + offset + base}, {-2.0 - offset - 0.5 * base}});
            });
        };
        const QField g1 = smooth(rng.range(0.0, 2 * kPi), rng.range(0.0, 2 * kPi), 0.0);
        const QField g2 = smooth(rng.range(0.0, 2 * kPi), rng.range(0.0, 2 * kPi), 1.2);
        auto [h, rep] = slab_interpolate(g1, g2, eps, 2.0);
        ratios.push_back(rep.achieved_constant);
        worst_trace = std::max({worst_trace, rep.trace_residual_first, rep.trace_residual_second});
    }
    double mean = 0.0;
    for (double r : ratios) mean += r / ratios.size();
    double spread = 0.0;
    for (double r : ratios) spread = std::max(spread, std::abs(r / mean - 1.0));
    out.require(worst_trace == 0.0, "slab traces exact at grid nodes");
    out.require(std::isfinite(mean) && mean > 0.0, "finite achieved constant");
    out.require(spread <= 0.2, "constant stable within 20% over 20 data sets (spread " + fmt(spread) + ")");

    // 1-D constant-gap closed form
    const double delta = 0.8;
    const QField z = make_constant_field(line, QPoint::zero(1, 1));
    const QField dq = make_constant_field(line, QPoint(1, 1, {delta}));
    auto [hd, repd] = slab_interpolate(z, dq, eps, 2.0);
    const double dev = std::abs(repd.energy / (delta * delta / eps) - 1.0);
    out.require(dev <= 0.02, "1-D constant gap matches the transit closed form (dev " + fmt(dev) + ")");

    // annulus route at m = 2
    SphereSamples c1 = SphereSamples::circle(256, 2, 1);
    SphereSamples c2 = SphereSamples::circle(256, 2, 1);
    for (int j = 0; j < 256; ++j) {
        const double th = 2.0 * kPi * j / 256;
        c1.set_value(j, QPoint::from_rows({{2.0 + 0.5 * std::cos(th)}, {-2.0 + 0.3 * std::sin(th)}}));
        c2.set_value(j, QPoint::from_rows({{2.0 - 0.4 * std::sin(2 * th)}, {-2.0 + 0.2 * std::cos(th)}}));
    }
    auto [ha, repa] = annulus_interpolate_2d(c1, c2, eps, 2.0);
    out.require(repa.trace_residual_first == 0.0 && repa.trace_residual_second == 0.0, "annulus traces exact");
    out.require(std::isfinite(repa.achieved_constant) && repa.achieved_constant > 0.0,
                "annulus constant finite (" + fmt(repa.achieved_constant) + ")");
    out.note("slab constant " + fmt(mean) + ", annulus constant " + fmt(repa.achieved_constant));
    return out;
}

// ---------------------------------------------------------------------------
// 13. byte-identical reports for identical seeds
Outcome criterion_determinism() {
    Outcome out;
    const fs::path dir = fs::path("acceptance-out") / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path scenario = dir / "scenario.json";
    {
        std::ofstream sf(scenario);
        sf << R"({
  "name": "determinism-probe",
  "seed": 2026,
  "generator": {"type": "analytic", "family": "branch-pair", "params": {"k": 1}},
  "domain": {"kind": "polar-disc", "Nr": 48, "Ntheta": 96},
  "suites": ["metric-props", "separation", "frequency", "stationarity"],
  "params": {"metric-props": {"trials": 400}, "separation": {"trials": 150},
             "frequency": {"expected_n": 0.5, "n_tol": 0.05}}
})";
    }
    const int code_a = run_scenario_file(scenario.string(), (dir / "a").string());
    const int code_b = run_scenario_file(scenario.string(), (dir / "b").string());
    out.require(code_a == 0 && code_b == 0, "scenario runs pass");
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const fs::path other = dir / "b" / entry.path().filename();
        if (!fs::exists(other)) {
            out.require(false, "missing twin file " + entry.path().filename().string());
            continue;
        }
        std::ifstream fa(entry.path(), std::ios::binary), fb(other, std::ios::binary);
        std::ostringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        if (sa.str() != sb.str()) out.require(false, "byte mismatch in " + entry.path().filename().string());
        ++compared;
    }
    out.require(compared >= 5, "all report files compared (" + std::to_string(compared) + ")");
    return out;
}

struct Criterion {
    int id;
    std::string label;
    double time_limit_s;
    std::function<Outcome()> fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "metric correctness", 10.0, criterion_metric},
        {2, "retraction contraction", 10.0, criterion_retraction},
        {3, "separation lemma postconditions", 30.0, criterion_separation},
        {4, "radial competitor energy closed form", 60.0, criterion_radial_energy},
        {5, "radial comparison gap certificate", 1.0, criterion_gap},
        {6, "dirichlet solver vs harmonic oracle", 30.0, criterion_solver_q1},
        {7, "branch-pair minimizer", 120.0, criterion_branch_pair},
        {8, "frequency monotonicity and H' identity", 60.0, criterion_frequency},
        {9, "squash identity and variation residuals", 60.0, criterion_stationarity},
        {10, "integrated frequency bounds", 30.0, criterion_frequency_bounds},
        {11, "VMO modulus and log-decay dichotomy", 60.0, criterion_vmo},
        {12, "interpolation bounds", 60.0, criterion_interpolation},
        {13, "deterministic reports", 60.0, criterion_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.details = std::string("exception: ") + e.what();
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > c.time_limit_s) {
            out.pass = false;
            out.details += "; exceeded time limit " + fmt(c.time_limit_s) + " s";
        }
        if (!out.pass) ++failures;
        std::printf("%s criterion %2d: %s [%.1f s]%s%s\n", out.pass ? "PASS" : "FAIL", c.id, c.label.c_str(), elapsed,
                    out.details.empty() ? "" : " - ", out.details.c_str());
        std::fflush(stdout);
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
