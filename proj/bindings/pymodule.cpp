#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "qvl/competitor.hpp"
#include "qvl/families.hpp"
#include "qvl/minimize.hpp"
#include "qvl/qfield.hpp"
#include "qvl/qpoint.hpp"
#include "qvl/scenario.hpp"
#include "qvl/serialization.hpp"
#include "qvl/station.hpp"

namespace py = pybind11;
using namespace qvl;

namespace {

// Grid and field handles keep shared ownership of the immutable domain.
struct Grid {
    std::shared_ptr<const GridDomain> g;
};

struct Field {
    QField f;
};

py::object json_to_py(const Json& j) {
    switch (j.type()) {
        case Json::value_t::null: return py::none();
        case Json::value_t::boolean: return py::bool_(j.get<bool>());
        case Json::value_t::number_integer: return py::int_(j.get<long long>());
        case Json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
        case Json::value_t::number_float: return py::float_(j.get<double>());
        case Json::value_t::string: return py::str(j.get<std::string>());
        case Json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        case Json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = json_to_py(it.value());
            return out;
        }
        default: return py::none();
    }
}

Json params_from_text(const std::string& text) {
    return text.empty() ? Json::object() : Json::parse(text);
}

SolveOptions options_from_text(const std::string& text, std::uint64_t seed) {
    const Json j = params_from_text(text);
    SolveOptions opts;
    opts.max_sweeps = j.value("max_sweeps", 4000);
    opts.tolerance = j.value("tolerance", 1e-12);
    opts.rematch_period = j.value("rematch_period", 1);
    opts.restarts = j.value("restarts", 1);
    opts.relaxation = j.value("relaxation", 1.8);
    opts.p = j.value("p", 2.0);
    opts.noise_amplitude = j.value("noise_amplitude", 0.1);
    opts.seed = j.value("seed", seed);
    return opts;
}

}  // namespace

PYBIND11_MODULE(_qvl, m) {
    m.doc() = "Q-valued metric space, discrete p-Dirichlet minimization, and stationarity diagnostics";

    py::class_<QPoint>(m, "QPoint")
        .def(py::init([](const std::vector<std::vector<double>>& rows) { return QPoint::from_rows(rows); }),
             py::arg("sheets"))
        .def_property_readonly("q", &QPoint::q)
        .def_property_readonly("n", &QPoint::n)
        .def("sheets",
             [](const QPoint& p) {
                 std::vector<std::vector<double>> rows;
                 for (int i = 0; i < p.q(); ++i) rows.emplace_back(p.sheet(i).begin(), p.sheet(i).end());
                 return rows;
             })
        .def("__eq__", [](const QPoint& a, const QPoint& b) { return a == b; })
        .def("__repr__", [](const QPoint& p) {
            return "QPoint(Q=" + std::to_string(p.q()) + ", n=" + std::to_string(p.n()) + ")";
        });

    m.def("zero_point", &QPoint::zero, py::arg("q"), py::arg("n"));
    m.def("metric", &metric);
    m.def("norm", [](const QPoint& u) { return norm(u); });
    m.def("barycenter", [](const QPoint& u) { return barycenter(u); });
    m.def("translate", [](const QPoint& u, const std::vector<double>& a) { return translate(u, a); });
    m.def("concat", &concat);
    m.def("diameter", &diameter);
    m.def("splitting", &splitting);
    m.def("snap_point", &snap, py::arg("v"), py::arg("tol"));
    m.def("retraction", &retraction, py::arg("v"), py::arg("r"), py::arg("u"));
    m.def("beta", [](double eps, int q) {
        const LogValue b = beta(eps, q);
        return py::make_tuple(b.log_value, b.value);
    });
    m.def("separate", &separate, py::arg("p"), py::arg("eps"));
    m.def("split_point", [](const QPoint& p) {
        const QSplit s = split_point(p);
        py::dict out;
        out["groups"] = s.groups;
        out["centers"] = s.centers;
        out["multiplicities"] = s.multiplicities;
        return out;
    });
    m.def("split_value", &split_value, py::arg("u"), py::arg("p"));
    m.def("m_p", &m_p);

    py::class_<Grid>(m, "Grid")
        .def_property_readonly("node_count", [](const Grid& g) { return g.g->node_count(); })
        .def_property_readonly("m", [](const Grid& g) { return g.g->m(); })
        .def_property_readonly("h", [](const Grid& g) { return g.g->h(); })
        .def("coord",
             [](const Grid& g, int node) {
                 const auto x = g.g->coord(node);
                 return std::vector<double>(x.begin(), x.begin() + g.g->m());
             })
        .def("boundary_nodes", [](const Grid& g) { return g.g->boundary_nodes(); })
        .def("__repr__", [](const Grid& g) {
            return "Grid(" + to_string(g.g->kind()) + ", nodes=" + std::to_string(g.g->node_count()) + ")";
        });

    m.def("grid_polar_disc", [](int nr, int ntheta, double radius, bool center) {
        return Grid{std::make_shared<const GridDomain>(GridDomain::polar_disc(nr, ntheta, radius, center))};
    }, py::arg("nr"), py::arg("ntheta"), py::arg("radius") = 1.0, py::arg("center") = true);
    m.def("grid_polar_disc_geometric", [](int nr, int ntheta, double rmin, double radius) {
        return Grid{std::make_shared<const GridDomain>(GridDomain::polar_disc_geometric(nr, ntheta, rmin, radius))};
    }, py::arg("nr"), py::arg("ntheta"), py::arg("rmin"), py::arg("radius") = 1.0);
    m.def("grid_polar_annulus", [](int nr, int ntheta, double rin, double rout) {
        return Grid{std::make_shared<const GridDomain>(GridDomain::polar_annulus(nr, ntheta, rin, rout))};
    }, py::arg("nr"), py::arg("ntheta"), py::arg("rin"), py::arg("rout") = 1.0);
    m.def("grid_ball", [](int m_, double h, double radius) {
        return Grid{std::make_shared<const GridDomain>(GridDomain::ball(m_, h, radius))};
    }, py::arg("m"), py::arg("h"), py::arg("radius") = 1.0);
    m.def("grid_cube", [](int m_, int cells) {
        return Grid{std::make_shared<const GridDomain>(GridDomain::cube(m_, cells))};
    }, py::arg("m"), py::arg("cells"));

    py::class_<Field>(m, "Field")
        .def_property_readonly("q", [](const Field& f) { return f.f.q(); })
        .def_property_readonly("n", [](const Field& f) { return f.f.n(); })
        .def_property_readonly("grid", [](const Field& f) { return Grid{f.f.domain_ptr()}; })
        .def("value", [](const Field& f, int node) { return f.f.value(node); })
        .def("__repr__", [](const Field& f) {
            return "Field(Q=" + std::to_string(f.f.q()) + ", n=" + std::to_string(f.f.n()) +
                   ", nodes=" + std::to_string(f.f.domain().node_count()) + ")";
        });

    m.def("generate", [](const std::string& family, const std::string& params, const Grid& grid) {
        return Field{generate_family_field(family, params_from_text(params), grid.g)};
    }, py::arg("family"), py::arg("params"), py::arg("grid"));
    m.def("load_field", [](const std::string& path) { return Field{load_qfield(path)}; });
    m.def("save_field", [](const Field& f, const std::string& path) { save_qfield(f.f, path); });

    m.def("energy", [](const Field& f, double p) { return energy(f.f, p); }, py::arg("field"), py::arg("p") = 2.0);
    m.def("edge_energy", [](const Field& f, double p) { return edge_energy(f.f, p); }, py::arg("field"),
          py::arg("p") = 2.0);
    m.def("ball_energy", [](const Field& f, const std::vector<double>& center, double r, double p) {
        return ball_energy(f.f, center, r, p);
    }, py::arg("field"), py::arg("center"), py::arg("r"), py::arg("p") = 2.0);
    m.def("sphere_integrals", [](const Field& f, const std::vector<double>& center, double r) {
        const SphereIntegrals si = sphere_integrals(f.f, center, r);
        py::dict out;
        out["radius"] = si.radius;
        out["h2"] = si.h2;
        out["radial_pair"] = si.radial_pair;
        out["radial_square"] = si.radial_square;
        return out;
    });

    m.def("solve_dirichlet", [](const Grid& grid, const Field& boundary_source, const std::string& options) {
        const SolveOptions opts = options_from_text(options, 1);
        DirichletSolution sol = solve_dirichlet(grid.g, trace(boundary_source.f), opts);
        py::dict info;
        info["final_energy"] = sol.final_energy;
        info["sweeps"] = sol.sweeps;
        info["converged"] = sol.converged;
        info["restart_used"] = sol.restart_used;
        info["energy_trace"] = sol.energy_trace;
        return py::make_tuple(Field{std::move(sol.field)}, info);
    }, py::arg("grid"), py::arg("boundary_source"), py::arg("options") = std::string());

    m.def("find_gap", [](int m_, double p, double big_m, double c) {
        return json_to_py(gap_certificate_to_json(find_gap(m_, p, big_m, c)));
    }, py::arg("m"), py::arg("p"), py::arg("M") = 0.0, py::arg("C") = -1.0);

    m.def("frequency_profile", [](const Field& f, const std::vector<double>& center, const std::vector<double>& radii) {
        const FrequencyProfile prof = frequency_profile(f.f, center, radii);
        py::dict out;
        py::list entries;
        for (const auto& e : prof.entries) {
            py::dict row;
            row["r"] = e.r;
            row["D"] = e.d;
            row["H"] = e.h;
            row["N"] = e.n;
            row["Theta"] = e.theta;
            row["h_prime_residual"] = e.h_prime_residual;
            entries.append(row);
        }
        out["entries"] = entries;
        out["min_n_step"] = prof.min_n_step;
        out["min_theta_step"] = prof.min_theta_step;
        out["max_h_residual"] = prof.max_h_residual;
        out["degenerate"] = prof.degenerate;
        out["vanishing_violation"] = prof.vanishing_violation;
        return out;
    });

    m.def("vmo_report", [](const Field& f, const std::vector<std::vector<double>>& centers,
                           const std::vector<double>& radii, int jmax) {
        const VMOReport rep = vmo_report(f.f, centers, radii, jmax);
        py::dict out;
        py::list entries;
        for (const auto& e : rep.entries) {
            py::dict row;
            row["r"] = e.r;
            row["omega"] = e.omega;
            row["worst_oscillation"] = e.worst_oscillation;
            entries.append(row);
        }
        py::list steps;
        for (const auto& s : rep.steps) {
            py::dict row;
            row["rho_j"] = s.rho_j;
            row["theta_j"] = s.theta_j;
            row["theta_j1"] = s.theta_j1;
            row["n_j"] = s.n_j;
            row["pass"] = s.pass;
            steps.append(row);
        }
        out["entries"] = entries;
        out["steps"] = steps;
        out["contraction_ok"] = rep.contraction_ok;
        out["fit_alpha"] = rep.fit_alpha;
        out["fit_c"] = rep.fit_c;
        out["better_than_log"] = rep.better_than_log;
        return out;
    }, py::arg("field"), py::arg("centers"), py::arg("radii"), py::arg("jmax") = 4);

    m.def("squeeze_residual_radial", [](const Field& f, double r0, double r1) {
        return squeeze_residual(f.f, radial_cutoff_field(f.f.domain().m(), r0, r1));
    });
    m.def("squash_residual_radial", [](const Field& f, double r0, double r1) {
        return squash_residual(f.f, radial_cutoff_fiber(f.f.domain().m(), f.f.n(), r0, r1));
    });
    m.def("squash_identity_residual", [](const Field& f, const std::vector<double>& center, double r) {
        return squash_identity_residual(f.f, center, r);
    });

    m.def("slab_interpolate", [](const Field& g1, const Field& g2, double eps, double p) {
        auto [h, rep] = slab_interpolate(g1.f, g2.f, eps, p);
        return py::make_tuple(Field{std::move(h)}, json_to_py(interpolation_report_to_json(rep)));
    });

    m.def("run_scenario", [](const std::string& path, const std::string& out_dir) {
        return run_scenario_file(path, out_dir);
    }, py::arg("scenario_path"), py::arg("out_dir"));

    // exception mapping: configuration and shape errors surface as ValueError
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
}
