#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qvl/errors.hpp"
#include "qvl/families.hpp"
#include "qvl/scenario.hpp"
#include "qvl/serialization.hpp"

using namespace qvl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    out << body;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::path("scenario-tests") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const char* kBranchScenario = R"({
  "name": "branch-pair-check",
  "seed": 421,
  "generator": {"type": "analytic", "family": "branch-pair", "params": {"k": 1}},
  "domain": {"kind": "polar-disc", "Nr": 48, "Ntheta": 96},
  "suites": ["frequency", "stationarity"],
  "params": {"frequency": {"expected_n": 0.5, "n_tol": 0.05}}
})";

}  // namespace

TEST_CASE("json round trips") {
    const QPoint p = QPoint::from_rows({{0.1, -2.0}, {3.0, 4.5}, {0.1, -2.0}});
    CHECK(qpoint_from_json(qpoint_to_json(p)) == p);

    for (const Json spec : {
             Json{{"kind", "box"}, {"lo", {-1.0}}, {"hi", {1.0}}, {"cells", {8}}},
             Json{{"kind", "ball"}, {"m", 2}, {"h", 0.25}},
             Json{{"kind", "polar-disc"}, {"Nr", 8}, {"Ntheta", 16}},
             Json{{"kind", "polar-disc"}, {"Nr", 16}, {"Ntheta", 16}, {"spacing", "geometric"}, {"rmin", 0.01}},
             Json{{"kind", "polar-annulus"}, {"Nr", 4}, {"Ntheta", 16}, {"rin", 0.5}},
         }) {
        auto g = grid_from_json(spec);
        auto g2 = grid_from_json(grid_to_json(*g));
        CHECK(g->node_count() == g2->node_count());
        CHECK(g->kind() == g2->kind());
        for (int node : {0, g->node_count() / 2, g->node_count() - 1}) {
            CHECK(g->coord(node) == g2->coord(node));
            CHECK(g->measure(node) == g2->measure(node));
        }
    }

    const auto disc = grid_from_json(Json{{"kind", "polar-disc"}, {"Nr", 6}, {"Ntheta", 12}});
    const QField f = make_branch_pair_field(disc, 1);
    const QField back = qfield_from_json(qfield_to_json(f));
    for (int node = 0; node < disc->node_count(); ++node) CHECK(back.value(node) == f.value(node));
}

TEST_CASE("scenario validation") {
    Json ok = Json::parse(kBranchScenario);
    CHECK_NOTHROW(parse_scenario(ok));

    Json no_suites = ok;
    no_suites["suites"] = Json::array();
    CHECK_THROWS_AS(parse_scenario(no_suites), ParameterError);

    Json bad_suite = ok;
    bad_suite["suites"] = {"frequency", "nope"};
    CHECK_THROWS_AS(parse_scenario(bad_suite), ParameterError);

    Json no_seed = ok;
    no_seed.erase("seed");
    no_seed["suites"] = {"metric-props"};
    CHECK_THROWS_AS(parse_scenario(no_seed), ParameterError);

    Json no_generator = ok;
    no_generator.erase("generator");
    CHECK_THROWS_AS(parse_scenario(no_generator), ParameterError);
}

TEST_CASE("scenario run and byte-identical reruns") {
    const fs::path dir = fresh_dir("determinism");
    const fs::path scenario = dir / "scenario.json";
    spit(scenario, kBranchScenario);

    const fs::path out_a = dir / "a";
    const fs::path out_b = dir / "b";
    CHECK(run_scenario_file(scenario.string(), out_a.string()) == 0);
    CHECK(run_scenario_file(scenario.string(), out_b.string()) == 0);

    int compared = 0;
    for (const auto& entry : fs::directory_iterator(out_a)) {
        const fs::path other = out_b / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
        ++compared;
    }
    CHECK(compared >= 3);  // two suite reports, manifest, tables

    Json manifest = Json::parse(slurp(out_a / "manifest.json"));
    CHECK(manifest.at("pass").get<bool>());
    CHECK(manifest.at("failures").empty());
    CHECK(manifest.at("scenario_hash").get<std::string>().size() == 16);
}

TEST_CASE("field-free suites run without a generator") {
    const fs::path dir = fresh_dir("fieldfree");
    const fs::path scenario = dir / "scenario.json";
    spit(scenario, R"({
      "name": "space-checks",
      "seed": 7,
      "suites": ["metric-props", "retraction", "separation", "radial-comparison"],
      "params": {"metric-props": {"trials": 300}, "retraction": {"trials": 300}, "separation": {"trials": 120}}
    })");
    CHECK(run_scenario_file(scenario.string(), (dir / "out").string()) == 0);
    const Json rep = Json::parse(slurp(dir / "out" / "separation.json"));
    CHECK(rep.at("pass").get<bool>());
}

TEST_CASE("cli end to end") {
    const fs::path dir = fresh_dir("cli");
    const std::string cli = QVL_CLI_PATH;

    // generate + reload
    const fs::path field_path = dir / "pair.json";
    {
        std::ostringstream cmd;
        cmd << cli << " generate branch-pair --params '{\"k\":1}'"
            << " --domain '{\"kind\":\"polar-disc\",\"Nr\":12,\"Ntheta\":24}'"
            << " --out " << field_path << " > /dev/null";
        CHECK(std::system(cmd.str().c_str()) == 0);
    }
    const QField loaded = load_qfield(field_path.string());
    CHECK(loaded.q() == 2);
    CHECK(loaded.n() == 2);

    // run a scenario consuming the generated file
    const fs::path scenario = dir / "scenario.json";
    spit(scenario, std::string(R"({
      "name": "from-file",
      "seed": 5,
      "generator": {"type": "file", "path": ")") +
                       field_path.string() + R"("},
      "suites": ["frequency"],
      "params": {"frequency": {"expected_n": 0.5, "n_tol": 0.08}}
    })");
    {
        std::ostringstream cmd;
        cmd << cli << " run " << scenario << " --out " << (dir / "out");
        CHECK(std::system(cmd.str().c_str()) == 0);
    }

    // merge
    {
        std::ostringstream cmd;
        cmd << cli << " report --merge " << (dir / "out");
        CHECK(std::system(cmd.str().c_str()) == 0);
    }
    CHECK(fs::exists(dir / "out" / "merged.json"));

    // malformed config: empty suite list is a usage error (exit 2)
    const fs::path bad = dir / "bad.json";
    spit(bad, R"({"name": "bad", "seed": 1, "suites": []})");
    {
        std::ostringstream cmd;
        cmd << cli << " run " << bad << " --out " << (dir / "bad-out") << " 2> /dev/null";
        const int code = std::system(cmd.str().c_str());
        CHECK(WEXITSTATUS(code) == 2);
    }
    // unknown subcommand: usage error
    {
        std::ostringstream cmd;
        cmd << cli << " frobnicate 2> /dev/null";
        const int code = std::system(cmd.str().c_str());
        CHECK(WEXITSTATUS(code) == 2);
    }
}

TEST_CASE("dirichlet generator writes a solver trace") {
    const fs::path dir = fresh_dir("solve");
    const fs::path scenario = dir / "scenario.json";
    spit(scenario, R"({
      "name": "solve-disc",
      "seed": 3,
      "generator": {
        "type": "dirichlet",
        "boundary": {"family": "harmonic", "params": {"degree": 1}},
        "solver": {"max_sweeps": 6000, "tolerance": 1e-12, "relaxation": 1.85}
      },
      "domain": {"kind": "polar-disc", "Nr": 32, "Ntheta": 64},
      "suites": ["frequency", "almost-min"],
      "params": {"frequency": {"expected_n": 1.0, "n_tol": 0.05}, "almost-min": {"ratio_tol": 0.01}}
    })");
    CHECK(run_scenario_file(scenario.string(), (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "solver_trace.csv"));
    const std::string trace = slurp(dir / "out" / "solver_trace.csv");
    CHECK(trace.rfind("sweep,energy,rematches", 0) == 0);
}
