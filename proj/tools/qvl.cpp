#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qvl/errors.hpp"
#include "qvl/scenario.hpp"
#include "qvl/serialization.hpp"

namespace {

int cmd_run(const std::string& scenario, const std::string& out_dir, double tol_scale, bool has_seed,
            std::uint64_t seed) {
    return qvl::run_scenario_file(scenario, out_dir, tol_scale, has_seed ? &seed : nullptr);
}

int cmd_generate(const std::string& family, const std::string& params_text, const std::string& domain_text,
                 const std::string& out_file, const std::string& jet_csv) {
    const qvl::Json params = params_text.empty() ? qvl::Json::object() : qvl::Json::parse(params_text);
    const qvl::Json domain_spec = qvl::Json::parse(domain_text);
    auto domain = qvl::domain_from_spec(domain_spec);
    const qvl::QField field = qvl::generate_family_field(family, params, domain);
    qvl::Json meta;
    meta["family"] = family;
    meta["params"] = params;
    qvl::save_qfield(field, out_file, meta);
    if (!jet_csv.empty()) {
        std::ofstream csv(jet_csv);
        csv << qvl::jet_norm_csv(field);
    }
    std::cout << "wrote " << out_file << " (" << field.domain().node_count() << " nodes)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for Q-valued Dirichlet minimization and stationarity checks"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "qvl-out";
    double tol_scale = 0.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    auto* run = app.add_subcommand("run", "execute a scenario file and write reports");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--tol-scale", tol_scale, "scale all hard tolerances");
    run->add_option("--seed", seed, "override the scenario seed")->each([&](const std::string&) { seed_set = true; });

    std::string family, params_text, domain_text, gen_out, jet_csv;
    auto* gen = app.add_subcommand("generate", "sample an analytic family into a field file");
    gen->add_option("family", family, "constant | linear | harmonic | branch-pair | branch-pair-angular | radial-ext")
        ->required();
    gen->add_option("--params", params_text, "family parameters as JSON");
    gen->add_option("--domain", domain_text, "grid spec as JSON")->required();
    gen->add_option("--out", gen_out, "output field file")->required();
    gen->add_option("--jet-csv", jet_csv, "also export the per-node jet norms as CSV");

    std::string merge_dir, merge_out;
    auto* rep = app.add_subcommand("report", "merge per-suite reports");
    rep->add_option("--merge", merge_dir, "directory of suite reports")->required();
    rep->add_option("--out", merge_out, "merged report path (default <dir>/merged.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(scenario_path, out_dir, tol_scale, seed_set, seed);
        if (gen->parsed()) return cmd_generate(family, params_text, domain_text, gen_out, jet_csv);
        if (merge_out.empty()) merge_out = merge_dir + "/merged.json";
        return qvl::merge_reports(merge_dir, merge_out);
    } catch (const qvl::ParameterError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const qvl::ShapeError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
