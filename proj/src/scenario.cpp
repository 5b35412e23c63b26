#include "qvl/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <numbers>
#include <set>
#include <thread>

#include "qvl/families.hpp"
#include "qvl/minimize.hpp"
#include "qvl/rng.hpp"
#include "qvl/station.hpp"

namespace qvl {

namespace {

constexpr double kPi = std::numbers::pi;

const std::set<std::string>& known_suites() {
    static const std::set<std::string> suites = {"metric-props", "retraction",  "separation",
                                                 "radial-comparison", "interpolation", "almost-min",
                                                 "stationarity",  "frequency",  "vmo",
                                                 "log-decay"};
    return suites;
}

bool randomized_suite(const std::string& suite) {
    return suite == "metric-props" || suite == "retraction" || suite == "separation" || suite == "interpolation";
}

bool needs_field(const std::string& suite) {
    return suite == "almost-min" || suite == "stationarity" || suite == "frequency" || suite == "vmo" ||
           suite == "log-decay" || suite == "radial-comparison";
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

QPoint random_qpoint(Rng& rng, int q, int n) {
    std::vector<double> flat(static_cast<std::size_t>(q) * n);
    for (double& x : flat) x = rng.range(-1.0, 1.0);
    return QPoint(q, n, std::move(flat));
}

void parallel_for(int count, const std::function<void(int)>& fn) {
    const int threads = std::min(thread_cap(), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------- suites --

SuiteReport run_metric_props(const Scenario& sc) {
    SuiteReport rep;
    rep.suite = "metric-props";
    const Json params = sc.suite_params("metric-props");
    const int trials = params.value("trials", 2000);
    Rng rng(sc.seed ^ 0x6d657472ULL);

    // exhaustive-permutation cross-check
    double worst_dev = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int q = rng.integer(1, 6), n = rng.integer(1, 4);
        const QPoint u = random_qpoint(rng, q, n);
        const QPoint v = random_qpoint(rng, q, n);
        const double fast = metric(u, v);
        // exhaustive minimum over all permutations
        std::vector<int> perm(q);
        for (int i = 0; i < q; ++i) perm[i] = i;
        double best = std::numeric_limits<double>::infinity();
        do {
            double s = 0.0;
            for (int i = 0; i < q; ++i) {
                auto a = u.sheet(i);
                auto b = v.sheet(perm[i]);
                for (int c = 0; c < n; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
            }
            best = std::min(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        worst_dev = std::max(worst_dev, std::abs(fast - std::sqrt(best)) / (1.0 + std::sqrt(best)));
    }
    rep.check("assignment_equals_exhaustive", worst_dev <= 1e-12 * sc.tol_scale, worst_dev, 1e-12 * sc.tol_scale);

    // triangle inequality
    double worst_triangle = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int q = rng.integer(1, 5), n = rng.integer(1, 4);
        const QPoint u = random_qpoint(rng, q, n);
        const QPoint v = random_qpoint(rng, q, n);
        const QPoint w = random_qpoint(rng, q, n);
        const double uv = metric(u, v), vw = metric(v, w), uw = metric(u, w);
        worst_triangle = std::max(worst_triangle, (uw - uv - vw) / (1.0 + uv + vw));
    }
    rep.check("triangle_inequality", worst_triangle <= 1e-9 * sc.tol_scale, worst_triangle, 1e-9 * sc.tol_scale);
    rep.payload["trials"] = trials;
    return rep;
}

SuiteReport run_retraction(const Scenario& sc) {
    SuiteReport rep;
    rep.suite = "retraction";
    const Json params = sc.suite_params("retraction");
    const int trials = params.value("trials", 2000);
    Rng rng(sc.seed ^ 0x72657472ULL);

    double worst_lip = 0.0, worst_range = 0.0;
    int identity_misses = 0, constant_misses = 0, done = 0;
    while (done < trials) {
        const int q = rng.integer(2, 4), n = rng.integer(1, 3);
        const QPoint v = random_qpoint(rng, q, n);
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
        const double lhs = metric(w1, w2), rhs = metric(u1, u2);
        worst_lip = std::max(worst_lip, (lhs - rhs) / (1.0 + rhs));
        worst_range = std::max(worst_range, (metric(w1, v) - r) / r);
        if (metric(u1, v) <= r && !(w1 == u1)) ++identity_misses;
        if (metric(u1, v) >= 2 * r && !(w1 == v)) ++constant_misses;
    }
    rep.check("lipschitz_contraction", worst_lip <= 1e-12 * sc.tol_scale, worst_lip, 1e-12 * sc.tol_scale);
    rep.check("range_in_ball", worst_range <= 1e-12 * sc.tol_scale, worst_range, 1e-12 * sc.tol_scale);
    rep.check("identity_inside", identity_misses == 0, identity_misses, 0);
    rep.check("constant_outside", constant_misses == 0, constant_misses, 0);
    rep.payload["trials"] = trials;
    return rep;
}

SuiteReport run_separation(const Scenario& sc) {
    SuiteReport rep;
    rep.suite = "separation";
    const Json params = sc.suite_params("separation");
    const int trials = params.value("trials", 500);
    Rng rng(sc.seed ^ 0x73657061ULL);

    int failures = 0, done = 0;
    double worst_gap = 0.0;
    while (done < trials) {
        const int q = rng.integer(2, 5), n = rng.integer(1, 3);
        QPoint p = random_qpoint(rng, q, n);
        if (done % 2 == 1) {
            // clustered input with tiny jitter
            const double jitter = std::pow(10.0, rng.range(-12.0, -1.0));
            std::vector<double> flat = p.flat();
            for (int i = 1; i < q; i += 2) {
                for (int c = 0; c < n; ++c) {
                    flat[static_cast<std::size_t>(i) * n + c] =
                        flat[static_cast<std::size_t>(i - 1) * n + c] + rng.range(-jitter, jitter);
                }
            }
            p = QPoint(q, n, std::move(flat));
        }
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
                if (cond2) worst_gap = std::max(worst_gap, metric(sep, p) / std::max(eps * s, 1e-300));
            } catch (const ConstructionError&) {
                ++failures;
            }
        }
    }
    rep.check("separation_postconditions", failures == 0, failures, 0);
    rep.payload["trials"] = trials;
    rep.payload["worst_relative_closeness"] = worst_gap;
    return rep;
}

SuiteReport run_radial_comparison(const Scenario& sc, const QField* field) {
    SuiteReport rep;
    rep.suite = "radial-comparison";
    const Json params = sc.suite_params("radial-comparison");
    const int m = params.value("m", 3);
    const double p = params.value("p", 2.0);
    const double c = params.value("C", 1.0);

    // gap certificate: positivity, defining inequality, reproducibility,
    // monotonicity in M
    const GapCertificate cert = find_gap(m, p, 0.0, c);
    const GapCertificate again = find_gap(m, p, 0.0, c);
    rep.check("certificate_positive_gap", cert.eta0 > 0.0, cert.eta0, 0.0);
    rep.check("certificate_inequality", cert.mval <= 1.0 / (m - p) - 2.0 * cert.eta0 + 1e-15, cert.mval,
              1.0 / (m - p) - 2.0 * cert.eta0);
    rep.check("certificate_reproducible",
              cert.alpha0 == again.alpha0 && cert.eta0 == again.eta0 && cert.mval == again.mval, 0.0, 0.0);
    double prev_eta = std::numeric_limits<double>::infinity();
    bool monotone = true;
    Json sweep = Json::array();
    for (double big_m : {0.0, 1.0, 10.0}) {
        const GapCertificate cm = find_gap(m, p, big_m, c);
        monotone = monotone && cm.eta0 <= prev_eta + 1e-15;
        prev_eta = cm.eta0;
        sweep.push_back(gap_certificate_to_json(cm));
    }
    rep.check("eta0_nonincreasing_in_M", monotone, 0.0, 0.0);
    rep.payload["certificate"] = gap_certificate_to_json(cert);
    rep.payload["M_sweep"] = std::move(sweep);

    // radial-extension energy agreement against the closed form (m = 2 disc)
    auto disc = std::make_shared<const GridDomain>(GridDomain::polar_disc(48, 192));
    SphereSamples trace = SphereSamples::circle(192, 1, 1);
    for (int j = 0; j < 192; ++j) trace.set_value(j, QPoint(1, 1, {trace.direction(j)[0]}));
    double worst_ratio_dev = 0.0;
    for (double alpha : {0.5, 1.0, 2.0}) {
        const double closed = radial_energy_closed_form(trace, alpha, 2.0, 2);
        const double discrete = energy(radial_extension(trace, alpha, disc), 2.0);
        worst_ratio_dev = std::max(worst_ratio_dev, std::abs(discrete / closed - 1.0));
    }
    rep.check("radial_energy_closed_form", worst_ratio_dev <= 0.03 * sc.tol_scale, worst_ratio_dev, 0.03 * sc.tol_scale);

    // decay inequality on the scenario field when p < m there
    if (field != nullptr && p < field->domain().m()) {
        std::vector<BallSpec> balls;
        for (double r : {0.35, 0.55, 0.75}) balls.push_back({std::vector<double>(field->domain().m(), 0.0), r});
        const RadialComparisonReport rc = radial_comparison_check(*field, cert, balls);
        rep.check("field_decay_inequality", rc.all_pass, rc.worst_margin, 0.0);
        Json rows = Json::array();
        for (const auto& row : rc.rows) {
            rows.push_back(Json{{"r", row.radius},
                                {"ball_energy", row.ball_energy},
                                {"boundary_energy", row.boundary_energy},
                                {"rhs", row.rhs},
                                {"margin", row.margin}});
        }
        rep.payload["field_rows"] = std::move(rows);
    }
    return rep;
}

SuiteReport run_interpolation(const Scenario& sc) {
    SuiteReport rep;
    rep.suite = "interpolation";
    const Json params = sc.suite_params("interpolation");
    const int datasets = params.value("datasets", 8);
    const double eps = params.value("eps", 0.25);
    const double p = params.value("p", 2.0);
    const int cells = params.value("cells", 64);
    Rng seeder(sc.seed ^ 0x696e7470ULL);

    auto line = std::make_shared<const GridDomain>(GridDomain::box({-1.0}, {1.0}, {cells}));
    std::vector<double> ratios(datasets, 0.0);
    std::vector<double> residuals(datasets, 0.0);
    std::vector<std::uint64_t> seeds(datasets);
    for (int d = 0; d < datasets; ++d) seeds[d] = seeder.next_u64();

    parallel_for(datasets, [&](int d) {
        Rng rng(seeds[d]);
        // two-sheet smooth data from one trig family with random phases; the
        // second layer keeps a fixed offset so both bound terms stay active
        auto smooth = [&](double amp, double phase1, double phase2, double offset) {
            return sample_field(line, 2, 1, [&](const std::array<double, 3>& x) {
                const double base = amp * std::sin(kPi * x[0] + phase1) + 0.3 * amp * std::sin(2.0 * kPi * x[0] + phase2);
                return QPoint::from_rows({{2.0 + offset + base}, {-2.0 - offset - 0.5 * base}});
            });
        };
        const QField g1 = smooth(0.8, rng.range(0.0, 2.0 * kPi), rng.range(0.0, 2.0 * kPi), 0.0);
        const QField g2 = smooth(0.8, rng.range(0.0, 2.0 * kPi), rng.range(0.0, 2.0 * kPi), 1.2);
        auto [h, r] = slab_interpolate(g1, g2, eps, p);
        ratios[d] = r.achieved_constant;
        residuals[d] = std::max(r.trace_residual_first, r.trace_residual_second);
    });

    double mean = 0.0, trace_residual = 0.0;
    for (int d = 0; d < datasets; ++d) {
        mean += ratios[d] / datasets;
        trace_residual = std::max(trace_residual, residuals[d]);
    }
    double spread = 0.0;
    for (double r : ratios) spread = std::max(spread, std::abs(r / mean - 1.0));
    rep.check("traces_exact", trace_residual == 0.0, trace_residual, 0.0);
    rep.check("constant_finite", std::isfinite(mean) && mean > 0.0, mean, 0.0);
    rep.check("constant_stable", spread <= 0.2 * sc.tol_scale, spread, 0.2 * sc.tol_scale);

    // 1-D constant-gap closed form
    const double delta = 0.8;
    const QField z = make_constant_field(line, QPoint::zero(1, 1));
    const QField dq = make_constant_field(line, QPoint(1, 1, {delta}));
    auto [hd, repd] = slab_interpolate(z, dq, eps, 2.0);
    const double closed_dev = std::abs(repd.energy / (delta * delta / eps) - 1.0);
    rep.check("constant_gap_closed_form", closed_dev <= 0.02 * sc.tol_scale, closed_dev, 0.02 * sc.tol_scale);

    // annulus route: identical and distinct circle data
    SphereSamples c1 = SphereSamples::circle(256, 1, 1);
    SphereSamples c2 = SphereSamples::circle(256, 1, 1);
    Rng rng(seeds[0] ^ 0xabcULL);
    const double ph1 = rng.range(0.0, 2.0 * kPi), ph2 = rng.range(0.0, 2.0 * kPi);
    for (int j = 0; j < 256; ++j) {
        const double th = 2.0 * kPi * j / 256;
        c1.set_value(j, QPoint(1, 1, {std::cos(th + ph1)}));
        c2.set_value(j, QPoint(1, 1, {0.5 * std::cos(2.0 * th + ph2)}));
    }
    auto [ha, repa] = annulus_interpolate_2d(c1, c2, eps, p);
    rep.check("annulus_traces_exact", repa.trace_residual_first == 0.0 && repa.trace_residual_second == 0.0,
              std::max(repa.trace_residual_first, repa.trace_residual_second), 0.0);
    rep.check("annulus_constant_finite", std::isfinite(repa.achieved_constant) && repa.achieved_constant > 0.0,
              repa.achieved_constant, 0.0);
    rep.payload["slab_ratios"] = ratios;
    rep.payload["annulus"] = interpolation_report_to_json(repa);

    std::string csv = "dataset,achieved_constant\n";
    for (int d = 0; d < datasets; ++d) csv += std::to_string(d) + "," + format_double(ratios[d]) + "\n";
    rep.tables.emplace_back("slab_constants", csv);
    return rep;
}

SolveOptions solve_options_from(const Json& params, std::uint64_t seed) {
    SolveOptions opts;
    opts.max_sweeps = params.value("max_sweeps", 4000);
    opts.tolerance = params.value("tolerance", 1e-12);
    opts.rematch_period = params.value("rematch_period", 1);
    opts.restarts = params.value("restarts", 1);
    opts.relaxation = params.value("relaxation", 1.8);
    opts.p = params.value("p", 2.0);
    opts.noise_amplitude = params.value("noise_amplitude", 0.1);
    opts.seed = params.value("seed", seed);
    return opts;
}

SuiteReport run_almost_min(const Scenario& sc, const QField& field) {
    SuiteReport rep;
    rep.suite = "almost-min";
    const Json params = sc.suite_params("almost-min");
    const double ratio_tol = params.value("ratio_tol", 0.05) * sc.tol_scale;
    const double omega_const = params.value("omega_const", 0.0);
    std::vector<BallSpec> balls;
    const std::vector<double> radii = params.value("radii", std::vector<double>{0.35, 0.55, 0.75});
    for (double r : radii) balls.push_back({std::vector<double>(field.domain().m(), 0.0), r});
    SolveOptions opts = solve_options_from(params, sc.seed);
    const AlmostMinReport audit =
        verify_almost_min(field, [omega_const](double) { return omega_const; }, balls, opts);
    rep.check("worst_ratio", audit.worst_ratio <= 1.0 + ratio_tol, audit.worst_ratio, 1.0 + ratio_tol);
    Json rows = Json::array();
    std::string csv = "radius,u_energy,resolve_energy,radial_energy,ratio\n";
    for (const auto& row : audit.rows) {
        rows.push_back(Json{{"radius", row.radius},
                            {"u_energy", row.u_energy},
                            {"resolve_energy", row.resolve_energy},
                            {"radial_energy", row.radial_energy},
                            {"ratio", row.ratio}});
        csv += format_double(row.radius) + "," + format_double(row.u_energy) + "," + format_double(row.resolve_energy) +
               "," + format_double(row.radial_energy) + "," + format_double(row.ratio) + "\n";
    }
    rep.payload["rows"] = std::move(rows);
    rep.tables.emplace_back("balls", csv);
    return rep;
}

SuiteReport run_stationarity(const Scenario& sc, const QField& field) {
    SuiteReport rep;
    rep.suite = "stationarity";
    const Json params = sc.suite_params("stationarity");
    const GridDomain& g = field.domain();
    const double scale = 1.0 + energy(field, 2.0);
    const double c_allow = params.value("c", 10.0) * sc.tol_scale;
    const double r_out = g.outer_radius();

    const VectorFieldSpec x_field = radial_cutoff_field(g.m(), 0.45 * r_out, 0.85 * r_out);
    const double squeeze = squeeze_residual(field, x_field);
    rep.check("squeeze_residual", std::abs(squeeze) <= c_allow * g.h() * scale, std::abs(squeeze),
              c_allow * g.h() * scale);

    const FiberFieldSpec y_field = radial_cutoff_fiber(g.m(), field.n(), 0.45 * r_out, 0.85 * r_out);
    const double squash = squash_residual(field, y_field);
    rep.check("squash_residual", std::abs(squash) <= c_allow * g.h() * scale, std::abs(squash), c_allow * g.h() * scale);

    const std::vector<double> origin(g.m(), 0.0);
    double worst_identity = 0.0;
    Json rows = Json::array();
    for (double r : params.value("radii", std::vector<double>{0.35, 0.55, 0.75})) {
        const double res = squash_identity_residual(field, origin, r * r_out);
        const double rel = std::abs(res) / scale;
        worst_identity = std::max(worst_identity, rel);
        rows.push_back(Json{{"r", snapped_radius(g, r * r_out)}, {"residual", res}});
    }
    rep.check("squash_identity", worst_identity <= c_allow * g.h(), worst_identity, c_allow * g.h());
    rep.payload["squeeze"] = squeeze;
    rep.payload["squash"] = squash;
    rep.payload["identity_rows"] = std::move(rows);
    return rep;
}

SuiteReport run_frequency(const Scenario& sc, const QField& field) {
    SuiteReport rep;
    rep.suite = "frequency";
    const Json params = sc.suite_params("frequency");
    const GridDomain& g = field.domain();
    const double r_out = g.outer_radius();
    std::vector<double> radii;
    if (params.contains("radii")) {
        radii = params.at("radii").get<std::vector<double>>();
    } else {
        for (int i = 0; i < 24; ++i) radii.push_back((0.2 + 0.7 * i / 23.0) * r_out);
    }
    const std::vector<double> origin(g.m(), 0.0);
    const FrequencyProfile prof = frequency_profile(field, origin, radii);
    const double tol = 5.0 * g.h() * sc.tol_scale;
    rep.check("n_monotone", prof.min_n_step >= -tol, prof.min_n_step, -tol);
    rep.check("theta_monotone", prof.min_theta_step >= -tol, prof.min_theta_step, -tol);
    rep.check("h_prime_identity", prof.max_h_residual <= tol, prof.max_h_residual, tol);
    rep.check("theta_prime_identity", prof.max_theta_residual <= tol, prof.max_theta_residual, tol);
    rep.check("no_vanishing_violation", !prof.vanishing_violation, prof.vanishing_violation ? 1.0 : 0.0, 0.0);
    if (params.contains("expected_n")) {
        const double expected = params.at("expected_n").get<double>();
        const double band = params.value("n_tol", 0.05) * sc.tol_scale;
        double worst = 0.0;
        for (const auto& e : prof.entries) worst = std::max(worst, std::abs(e.n - expected));
        rep.check("frequency_value", worst <= band, worst, band);
    }
    const FrequencyBoundsReport bounds = frequency_bounds_check(prof, radii.back());
    rep.check("frequency_bounds", bounds.worst_margin >= -tol, bounds.worst_margin, -tol);

    std::string csv = "r,D,H,N,Theta,h_prime_residual,theta_prime_residual\n";
    Json rows = Json::array();
    for (const auto& e : prof.entries) {
        csv += format_double(e.r) + "," + format_double(e.d) + "," + format_double(e.h) + "," + format_double(e.n) +
               "," + format_double(e.theta) + "," + format_double(e.h_prime_residual) + "," +
               format_double(e.theta_prime_residual) + "\n";
        rows.push_back(Json{{"r", e.r}, {"D", e.d}, {"H", e.h}, {"N", e.n}, {"Theta", e.theta}});
    }
    rep.payload["entries"] = std::move(rows);
    rep.payload["min_n_step"] = prof.min_n_step;
    rep.payload["max_h_residual"] = prof.max_h_residual;
    rep.tables.emplace_back("profile", csv);
    return rep;
}

SuiteReport run_vmo(const Scenario& sc, const QField& field) {
    SuiteReport rep;
    rep.suite = "vmo";
    const Json params = sc.suite_params("vmo");
    std::vector<std::vector<double>> centers;
    if (params.contains("centers")) {
        centers = params.at("centers").get<std::vector<std::vector<double>>>();
    } else {
        centers = {{0.0, 0.0}, {0.25, 0.0}, {0.0, -0.3}};
    }
    std::vector<double> radii;
    if (params.contains("radii")) {
        radii = params.at("radii").get<std::vector<double>>();
    } else {
        for (int i = 1; i <= 10; ++i) radii.push_back(0.05 * i);
    }
    const VMOReport vmo = vmo_report(field, centers, radii, params.value("jmax", 4));
    rep.check("omega_monotone", vmo.min_omega_step >= -1e-9 * sc.tol_scale, vmo.min_omega_step, -1e-9 * sc.tol_scale);
    const double ratio_cap = params.value("oscillation_ratio_cap", 50.0) * sc.tol_scale;
    rep.check("oscillation_controlled", vmo.worst_oscillation_ratio <= ratio_cap, vmo.worst_oscillation_ratio,
              ratio_cap);
    rep.payload["fit_c"] = vmo.fit_c;
    rep.payload["fit_alpha"] = vmo.fit_alpha;
    rep.payload["better_than_log"] = vmo.better_than_log;
    rep.payload["required_contraction_c"] = vmo.required_contraction_c;
    std::string csv = "r,omega,worst_oscillation,oscillation_ratio\n";
    for (const auto& e : vmo.entries) {
        csv += format_double(e.r) + "," + format_double(e.omega) + "," + format_double(e.worst_oscillation) + "," +
               format_double(e.oscillation_ratio) + "\n";
    }
    rep.tables.emplace_back("omega", csv);
    return rep;
}

SuiteReport run_log_decay(const Scenario& sc, const QField& field) {
    SuiteReport rep;
    rep.suite = "log-decay";
    const Json params = sc.suite_params("log-decay");
    std::vector<std::vector<double>> centers = {{0.0, 0.0}};
    std::vector<double> radii;
    for (int i = 1; i <= 6; ++i) radii.push_back(0.08 * i);
    const int jmax = params.value("jmax", 4);
    const VMOReport vmo = vmo_report(field, centers, radii, jmax);
    const int min_steps = params.value("min_steps", 3);
    rep.check("enough_resolvable_steps", static_cast<int>(vmo.steps.size()) >= min_steps,
              static_cast<double>(vmo.steps.size()), min_steps);
    rep.check("contraction_dichotomy", vmo.contraction_ok, vmo.contraction_ok ? 1.0 : 0.0, 1.0);
    std::string csv = "rho_j,rho_j1,theta_j,theta_j1,n_j,theta_halves,n_small,pass\n";
    Json rows = Json::array();
    for (const auto& s : vmo.steps) {
        csv += format_double(s.rho_j) + "," + format_double(s.rho_j1) + "," + format_double(s.theta_j) + "," +
               format_double(s.theta_j1) + "," + format_double(s.n_j) + "," + std::to_string(s.theta_halves) + "," +
               std::to_string(s.n_small) + "," + std::to_string(s.pass) + "\n";
        rows.push_back(Json{{"rho_j", s.rho_j},
                            {"theta_j", s.theta_j},
                            {"theta_j1", s.theta_j1},
                            {"n_j", s.n_j},
                            {"pass", s.pass}});
    }
    rep.payload["steps"] = std::move(rows);
    rep.payload["fit_alpha"] = vmo.fit_alpha;
    rep.payload["fit_c"] = vmo.fit_c;
    rep.tables.emplace_back("steps", csv);
    return rep;
}

}  // namespace

void SuiteReport::check(const std::string& name, bool ok, double value, double bound) {
    assertions.push_back({name, ok, value, bound});
    pass = pass && ok;
}

Json Scenario::suite_params(const std::string& suite) const {
    if (params.contains(suite)) return params.at(suite);
    return Json::object();
}

Scenario parse_scenario(const Json& doc) {
    Scenario sc;
    if (!doc.is_object()) throw ParameterError("scenario: expected a JSON object");
    sc.name = doc.value("name", std::string(""));
    if (sc.name.empty()) throw ParameterError("scenario: name required");
    if (!doc.contains("suites") || !doc.at("suites").is_array() || doc.at("suites").empty()) {
        throw ParameterError("scenario: nonempty suite list required");
    }
    for (const auto& s : doc.at("suites")) {
        const std::string suite = s.get<std::string>();
        if (!known_suites().count(suite)) throw ParameterError("scenario: unknown suite " + suite);
        sc.suites.push_back(suite);
    }
    sc.has_seed = doc.contains("seed");
    if (sc.has_seed) sc.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& suite : sc.suites) {
        if (randomized_suite(suite) && !sc.has_seed) {
            throw ParameterError("scenario: seed required for randomized suite " + suite);
        }
    }
    if (doc.contains("generator")) sc.generator = doc.at("generator");
    if (doc.contains("domain")) sc.domain = doc.at("domain");
    sc.tol_scale = doc.value("tol_scale", 1.0);
    if (doc.contains("params")) sc.params = doc.at("params");
    for (const auto& suite : sc.suites) {
        if (needs_field(suite) && suite != "radial-comparison" && sc.generator.is_null()) {
            throw ParameterError("scenario: suite " + suite + " requires a generator");
        }
    }
    return sc;
}

std::shared_ptr<const GridDomain> domain_from_spec(const Json& spec) {
    if (spec.is_null()) throw ParameterError("domain spec required");
    return grid_from_json(spec);
}

QField generate_family_field(const std::string& family, const Json& params,
                             std::shared_ptr<const GridDomain> domain) {
    if (family == "constant") {
        const QPoint value = qpoint_from_json(params.at("value"));
        return make_constant_field(std::move(domain), value);
    }
    if (family == "linear") {
        return make_linear_field(std::move(domain), params.at("matrix").get<std::vector<std::vector<double>>>());
    }
    if (family == "harmonic") {
        return make_harmonic_field(std::move(domain), params.value("degree", 1));
    }
    if (family == "branch-pair") {
        return make_branch_pair_field(std::move(domain), params.value("k", 1));
    }
    if (family == "branch-pair-angular") {
        return make_branch_pair_angular_field(std::move(domain), params.value("k", 1));
    }
    if (family == "radial-ext") {
        // radial extension of the trace of a base family
        const Json base = params.at("base");
        QField source = generate_family_field(base.at("family").get<std::string>(), base.value("params", Json::object()),
                                              domain);
        SphereSamples tr = SphereSamples::from_polar_trace(source);
        return radial_extension(tr, params.value("alpha", 1.0), std::move(domain));
    }
    throw ParameterError("unknown family: " + family);
}

QField build_scenario_field(const Scenario& sc, std::string* solver_trace_csv) {
    if (sc.generator.is_null()) throw ParameterError("scenario has no generator");
    const std::string type = sc.generator.value("type", std::string("analytic"));
    if (type == "file") {
        return load_qfield(sc.generator.at("path").get<std::string>());
    }
    auto domain = domain_from_spec(sc.domain);
    if (type == "analytic") {
        return generate_family_field(sc.generator.at("family").get<std::string>(),
                                     sc.generator.value("params", Json::object()), std::move(domain));
    }
    if (type == "dirichlet") {
        const Json bspec = sc.generator.at("boundary");
        QField source = generate_family_field(bspec.at("family").get<std::string>(),
                                              bspec.value("params", Json::object()), domain);
        const NodeValues boundary = trace(source);
        SolveOptions opts = solve_options_from(sc.generator.value("solver", Json::object()), sc.seed);
        DirichletSolution sol = solve_dirichlet(domain, boundary, opts);
        if (solver_trace_csv != nullptr) {
            std::string csv = "sweep,energy,rematches\n";
            for (std::size_t i = 0; i < sol.energy_trace.size(); ++i) {
                const int rem = i == 0 ? 0 : sol.rematch_trace[i - 1];
                csv += std::to_string(i) + "," + format_double(sol.energy_trace[i]) + "," + std::to_string(rem) + "\n";
            }
            *solver_trace_csv = std::move(csv);
        }
        return std::move(sol.field);
    }
    throw ParameterError("unknown generator type: " + type);
}

int thread_cap() {
    if (const char* env = std::getenv("QVL_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

int run_scenario_file(const std::string& scenario_path, const std::string& out_dir, double tol_scale_override,
                      const std::uint64_t* seed_override) {
    std::ifstream in(scenario_path);
    if (!in) throw ParameterError("cannot open scenario file: " + scenario_path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Json doc;
    try {
        doc = Json::parse(bytes);
    } catch (const std::exception& e) {
        throw ParameterError(std::string("scenario parse error: ") + e.what());
    }
    if (seed_override != nullptr) doc["seed"] = *seed_override;
    Scenario sc = parse_scenario(doc);
    sc.source_hash = fnv1a_hex(bytes);
    if (tol_scale_override > 0.0) sc.tol_scale = tol_scale_override;

    std::filesystem::create_directories(out_dir);

    // field construction happens once, shared across suites
    std::optional<QField> field;
    std::string solver_trace;
    bool field_needed = false;
    for (const auto& suite : sc.suites) field_needed = field_needed || (needs_field(suite) && suite != "radial-comparison");
    if ((field_needed || !sc.generator.is_null()) && !sc.generator.is_null()) {
        field = build_scenario_field(sc, &solver_trace);
        if (!solver_trace.empty()) {
            std::ofstream tr(out_dir + "/solver_trace.csv");
            tr << solver_trace;
        }
    }

    Json manifest;
    manifest["scenario"] = sc.name;
    manifest["scenario_hash"] = sc.source_hash;
    manifest["seed"] = sc.seed;
    manifest["tol_scale"] = sc.tol_scale;
    if (!sc.domain.is_null()) manifest["grid"] = sc.domain;
    manifest["suites"] = sc.suites;
    Json failures = Json::array();

    bool all_pass = true;
    for (const auto& suite : sc.suites) {
        SuiteReport rep;
        // a failing suite never aborts the remaining ones
        try {
            if (suite == "metric-props") {
                rep = run_metric_props(sc);
            } else if (suite == "retraction") {
                rep = run_retraction(sc);
            } else if (suite == "separation") {
                rep = run_separation(sc);
            } else if (suite == "radial-comparison") {
                rep = run_radial_comparison(sc, field ? &*field : nullptr);
            } else if (suite == "interpolation") {
                rep = run_interpolation(sc);
            } else if (suite == "almost-min") {
                rep = run_almost_min(sc, *field);
            } else if (suite == "stationarity") {
                rep = run_stationarity(sc, *field);
            } else if (suite == "frequency") {
                rep = run_frequency(sc, *field);
            } else if (suite == "vmo") {
                rep = run_vmo(sc, *field);
            } else {
                rep = run_log_decay(sc, *field);
            }
        } catch (const std::exception& e) {
            rep.suite = suite;
            rep.check(std::string("exception: ") + e.what(), false, 0.0, 0.0);
        }

        Json out;
        out["suite"] = rep.suite;
        out["pass"] = rep.pass;
        out["scenario_hash"] = sc.source_hash;
        out["seed"] = sc.seed;
        out["tol_scale"] = sc.tol_scale;
        if (!sc.domain.is_null()) out["grid"] = sc.domain;
        Json asserts = Json::array();
        for (const auto& a : rep.assertions) {
            asserts.push_back(Json{{"name", a.name}, {"pass", a.pass}, {"value", a.value}, {"bound", a.bound}});
            if (!a.pass) failures.push_back(Json{{"suite", rep.suite}, {"assertion", a.name}});
        }
        out["assertions"] = std::move(asserts);
        out["results"] = rep.payload;
        std::ofstream jf(out_dir + "/" + rep.suite + ".json");
        jf << out.dump(1) << "\n";
        for (const auto& [name, csv] : rep.tables) {
            std::ofstream cf(out_dir + "/" + rep.suite + "_" + name + ".csv");
            cf << csv;
        }
        all_pass = all_pass && rep.pass;
    }
    manifest["failures"] = std::move(failures);
    manifest["pass"] = all_pass;
    std::ofstream mf(out_dir + "/manifest.json");
    mf << manifest.dump(1) << "\n";
    return all_pass ? 0 : 1;
}

int merge_reports(const std::string& dir, const std::string& out_file) {
    Json merged = Json::object();
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json" && entry.path().filename() != "merged.json") {
            names.push_back(entry.path().string());
        }
    }
    std::sort(names.begin(), names.end());
    Json reports = Json::array();
    bool pass = true;
    for (const auto& name : names) {
        std::ifstream in(name);
        Json j;
        in >> j;
        if (j.contains("pass") && j.at("pass").is_boolean()) pass = pass && j.at("pass").get<bool>();
        reports.push_back(Json{{"file", std::filesystem::path(name).filename().string()}, {"report", std::move(j)}});
    }
    merged["reports"] = std::move(reports);
    merged["pass"] = pass;
    std::ofstream out(out_file);
    if (!out) throw ParameterError("merge_reports: cannot open " + out_file);
    out << merged.dump(1) << "\n";
    return pass ? 0 : 1;
}

}  // namespace qvl
