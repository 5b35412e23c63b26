#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qvl/serialization.hpp"

namespace qvl {

struct SuiteAssertion {
    std::string name;
    bool pass;
    double value;
    double bound;
};

struct SuiteReport {
    std::string suite;
    bool pass = true;
    std::vector<SuiteAssertion> assertions;
    Json payload = Json::object();
    std::vector<std::pair<std::string, std::string>> tables;  ///< (name, csv body)

    /// Records a hard assertion: value must satisfy the described bound.
    void check(const std::string& name, bool ok, double value, double bound);
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    bool has_seed = false;
    Json generator = Json();
    Json domain = Json();
    std::vector<std::string> suites;
    double tol_scale = 1.0;
    Json params = Json::object();
    std::string source_hash;

    Json suite_params(const std::string& suite) const;
};

/// Validates and decodes a scenario document. Unknown suites, an empty suite
/// list, or a missing seed for randomized suites raise ParameterError.
Scenario parse_scenario(const Json& doc);

std::shared_ptr<const GridDomain> domain_from_spec(const Json& spec);

/// Builds a field from a generator spec: analytic family, dirichlet solve,
/// or file load. The solver energy trace, when any, is returned as CSV.
QField build_scenario_field(const Scenario& sc, std::string* solver_trace_csv = nullptr);

/// Analytic family dispatcher shared by the CLI generate command.
QField generate_family_field(const std::string& family, const Json& params, std::shared_ptr<const GridDomain> domain);

/// Runs all suites, writing <suite>.json, <suite>_<table>.csv and
/// manifest.json under out_dir. Returns 0 iff every hard assertion passed.
/// Configuration errors throw ParameterError.
int run_scenario_file(const std::string& scenario_path, const std::string& out_dir, double tol_scale_override = 0.0,
                      const std::uint64_t* seed_override = nullptr);

/// Merges every *.json suite report in dir into <out_file>.
int merge_reports(const std::string& dir, const std::string& out_file);

/// Parallelism cap from QVL_THREADS (default: hardware, at most 8).
int thread_cap();

/// FNV-1a 64-bit content hash, hex-encoded; stable across platforms.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace qvl
