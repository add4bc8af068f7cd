#pragma once

// Structured documents for the command-line front end. Every document carries
// schema_version; apart from the "timings" object, output is a deterministic
// function of the inputs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hfchc/graph.hpp"
#include "hfchc/hybrid.hpp"

namespace hfchc::report {

inline constexpr int kSchemaVersion = 1;

enum class SolveMode { Classical, NonRecursive, Hybrid };
SolveMode parse_mode(const std::string& name);
std::string mode_name(SolveMode mode);

// Brute-force vertex cap: HYBRID_FCHC_ORACLE_LIMIT when set, else 20.
uint32_t oracle_limit();

struct SolveRequest {
    SolveMode mode = SolveMode::Classical;
    double c = 0;
    bool oracle_check = false;
    std::optional<hybrid::SpaceModel> model;  // hybrid only; default_model() otherwise
};

struct SolveResult {
    bool verdict;
    // Set when the oracle ran and disagreed.
    bool oracle_mismatch = false;
    nlohmann::json doc;
};

SolveResult solve_document(const ParsedGraph& pg, const SolveRequest& req);

nlohmann::json model_to_json(const hybrid::SpaceModel& m);
hybrid::SpaceModel model_from_json(const nlohmann::json& j);
// Calibrated on the triangle-free corpus up to 12 vertices plus the fixed-size
// family up to 40 vertices, one branch level deep. Computed once per process.
const hybrid::SpaceModel& default_model(hybrid::CalibrationReport* report = nullptr);

struct CGrid {
    double lo, hi;
    uint32_t count;
};
// "lo:hi:count".
CGrid parse_c_grid(const std::string& spec);
nlohmann::json analyze_document(const CGrid& grid, const hybrid::SpaceModel& model,
                                const std::optional<hybrid::CalibrationReport>& calibration);

// The (i, l) block schedule Reduce executes for one ν, with the oracle calls
// each block spent. ν is the witness when the instance accepts, else zeros.
nlohmann::json schedule_document(const ParsedGraph& pg);

struct SuiteResult {
    std::string name;
    uint64_t checks = 0;
    std::vector<std::string> failures;
};
// Suites: encodings, setgen, eppstein, qsim, hybrid. Throws std::invalid_argument
// for other names.
SuiteResult run_suite(const std::string& name);
const std::vector<std::string>& suite_names();

}  // namespace hfchc::report
