#include "qvl/serialization.hpp"

#include <cstdio>
#include <fstream>

#include "qvl/errors.hpp"

namespace qvl {

namespace {
std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

Json qpoint_to_json(const QPoint& p) {
    Json sheets = Json::array();
    for (int i = 0; i < p.q(); ++i) {
        Json sheet = Json::array();
        for (double v : p.sheet(i)) sheet.push_back(v);
        sheets.push_back(std::move(sheet));
    }
    return sheets;
}

QPoint qpoint_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ParameterError("qpoint_from_json: expected a nonempty array");
    std::vector<std::vector<double>> rows;
    for (const auto& sheet : j) rows.push_back(sheet.get<std::vector<double>>());
    return QPoint::from_rows(rows);
}

Json grid_to_json(const GridDomain& g) {
    Json out;
    out["kind"] = to_string(g.kind());
    out["m"] = g.m();
    switch (g.kind()) {
        case GridKind::Box: {
            out["lo"] = g.lo();
            out["hi"] = g.hi();
            Json cells = Json::array();
            for (int k = 0; k < g.m(); ++k) {
                cells.push_back(static_cast<int>(std::lround((g.hi()[k] - g.lo()[k]) / g.step()[k])));
            }
            out["cells"] = std::move(cells);
            break;
        }
        case GridKind::Ball:
            out["h"] = g.step()[0];
            out["radius"] = g.outer_radius();
            break;
        case GridKind::PolarDisc: {
            out["Nr"] = g.ring_count();
            out["Ntheta"] = g.n_theta();
            out["radius"] = g.outer_radius();
            out["center"] = g.has_center();
            const bool geometric = !g.has_center() && g.ring_count() >= 2 &&
                                   std::abs(g.ring_radius(2) / g.ring_radius(1) -
                                            g.ring_radius(g.ring_count()) / g.ring_radius(g.ring_count() - 1)) < 1e-9 &&
                                   std::abs(g.ring_radius(2) - 2.0 * g.ring_radius(1)) > 1e-12;
            out["spacing"] = geometric ? "geometric" : "uniform";
            if (geometric) out["rmin"] = g.ring_radius(1);
            break;
        }
        case GridKind::PolarAnnulus:
            out["Nr"] = g.ring_count() - 1;
            out["Ntheta"] = g.n_theta();
            out["rin"] = g.inner_radius();
            out["rout"] = g.outer_radius();
            break;
    }
    return out;
}

std::shared_ptr<const GridDomain> grid_from_json(const Json& j) {
    const GridKind kind = grid_kind_from_string(j.at("kind").get<std::string>());
    switch (kind) {
        case GridKind::Box: {
            if (j.contains("lo")) {
                return std::make_shared<const GridDomain>(GridDomain::box(j.at("lo").get<std::vector<double>>(),
                                                                          j.at("hi").get<std::vector<double>>(),
                                                                          j.at("cells").get<std::vector<int>>()));
            }
            const int m = j.at("m").get<int>();
            const int cells = j.at("cells").is_array() ? j.at("cells")[0].get<int>() : j.at("cells").get<int>();
            return std::make_shared<const GridDomain>(GridDomain::cube(m, cells));
        }
        case GridKind::Ball:
            return std::make_shared<const GridDomain>(
                GridDomain::ball(j.at("m").get<int>(), j.at("h").get<double>(), j.value("radius", 1.0)));
        case GridKind::PolarDisc: {
            const int nr = j.at("Nr").get<int>();
            const int nt = j.at("Ntheta").get<int>();
            const double radius = j.value("radius", 1.0);
            if (j.value("spacing", std::string("uniform")) == "geometric") {
                return std::make_shared<const GridDomain>(
                    GridDomain::polar_disc_geometric(nr, nt, j.at("rmin").get<double>(), radius));
            }
            return std::make_shared<const GridDomain>(GridDomain::polar_disc(nr, nt, radius, j.value("center", true)));
        }
        case GridKind::PolarAnnulus:
            return std::make_shared<const GridDomain>(GridDomain::polar_annulus(
                j.at("Nr").get<int>(), j.at("Ntheta").get<int>(), j.at("rin").get<double>(), j.value("rout", 1.0)));
    }
    throw ParameterError("grid_from_json: unknown kind");
}

Json qfield_to_json(const QField& f, const Json& meta) {
    Json out;
    Json header = grid_to_json(f.domain());
    header["Q"] = f.q();
    header["n"] = f.n();
    out["header"] = std::move(header);
    if (!meta.empty()) out["meta"] = meta;
    Json values = Json::array();
    for (int node = 0; node < f.domain().node_count(); ++node) values.push_back(qpoint_to_json(f.value(node)));
    out["values"] = std::move(values);
    return out;
}

QField qfield_from_json(const Json& j) {
    const Json& header = j.at("header");
    auto grid = grid_from_json(header);
    QField f(grid, header.at("Q").get<int>(), header.at("n").get<int>());
    const Json& values = j.at("values");
    if (static_cast<int>(values.size()) != grid->node_count()) {
        throw ShapeError("qfield_from_json: node count mismatch");
    }
    for (int node = 0; node < grid->node_count(); ++node) f.set(node, qpoint_from_json(values[node]));
    return f;
}

void save_qfield(const QField& f, const std::string& path, const Json& meta) {
    std::ofstream out(path);
    if (!out) throw ParameterError("save_qfield: cannot open " + path);
    out << qfield_to_json(f, meta).dump(1) << "\n";
}

QField load_qfield(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("load_qfield: cannot open " + path);
    Json j;
    in >> j;
    return qfield_from_json(j);
}

std::string jet_norm_csv(const QField& f) {
    const GridDomain& g = f.domain();
    std::string csv = "node";
    for (int k = 0; k < g.m(); ++k) csv += ",x" + std::to_string(k);
    csv += ",jet_norm\n";
    const std::vector<double> density = jet_density(f, 2.0);
    for (int node = 0; node < g.node_count(); ++node) {
        const auto x = g.coord(node);
        csv += std::to_string(node);
        for (int k = 0; k < g.m(); ++k) csv += "," + format_double(x[k]);
        csv += "," + format_double(std::sqrt(density[node]));
        csv += "\n";
    }
    return csv;
}

Json gap_certificate_to_json(const GapCertificate& cert) {
    Json out;
    out["m"] = cert.m;
    out["p"] = cert.p;
    out["M"] = cert.big_m;
    out["C"] = cert.c;
    out["alpha0"] = cert.alpha0;
    out["delta0"] = cert.delta0;
    out["eta0"] = cert.eta0;
    out["mval"] = cert.mval;
    out["eps0"] = cert.eps0;
    return out;
}

Json interpolation_report_to_json(const InterpolationReport& rep) {
    Json out;
    out["p"] = rep.p;
    out["eps"] = rep.eps;
    out["energy"] = rep.energy;
    out["boundary_energy_sum"] = rep.boundary_energy_sum;
    out["gap_integral"] = rep.gap_integral;
    out["bound"] = rep.bound;
    out["achieved_constant"] = rep.achieved_constant;
    out["k_to_p"] = rep.k_to_p;
    out["trace_residual_first"] = rep.trace_residual_first;
    out["trace_residual_second"] = rep.trace_residual_second;
    return out;
}

}  // namespace qvl
