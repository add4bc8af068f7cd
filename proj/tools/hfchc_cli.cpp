// hfchc: solve, generate, contract, analyze, verify and trace FCHC instances.
//
// Exit codes: solve returns 0 for a Hamiltonian instance and 1 otherwise;
// verify returns 1 when a suite fails; every usage or input error returns 2.

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hfchc/errors.hpp"
#include "hfchc/graph.hpp"
#include "hfchc/report.hpp"

using namespace hfchc;
using nlohmann::json;

namespace {

constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const json& doc, const std::string& out_path) {
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw UsageError("cannot write " + out_path);
    f << text;
}

void print_plain(const json& doc) {
    std::cout << "verdict: " << (doc["verdict"].get<bool>() ? "true" : "false") << "\n";
    std::cout << "n: " << doc["n"] << "  m: " << doc["m"] << "  s: " << doc["s"] << "  mode: "
              << doc["mode"].get<std::string>() << "\n";
    for (const auto& [k, v] : doc["stats"].items()) std::cout << "  " << k << ": " << v.dump() << "\n";
    if (doc.contains("oracle")) std::cout << "oracle: " << doc["oracle"].dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forced cubic Hamiltonian cycle solver and simulator"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP threads (results do not depend on it)")->check(CLI::PositiveNumber);

    std::string graph_path, mode = "classical", out_dir, out_path, model_path, c_grid = "0.01:0.5:50", suite;
    double c = -1;
    bool oracle_check = false, as_json = false, emit_schedule = false;
    uint32_t gen_n = 0, count = 1;
    uint64_t seed = 1;

    auto* solve = app.add_subcommand("solve", "Decide one instance");
    solve->add_option("--graph", graph_path, "Graph file")->required();
    solve->add_option("--mode", mode, "classical | nonrecursive | hybrid")
        ->check(CLI::IsMember({"classical", "nonrecursive", "hybrid"}));
    solve->add_option("--c", c, "Qubit fraction for hybrid mode");
    solve->add_option("--model", model_path, "Space model JSON (hybrid mode)");
    solve->add_flag("--oracle-check", oracle_check, "Cross-check with brute force when within the limit");
    solve->add_flag("--json", as_json, "Structured output");

    auto* gen = app.add_subcommand("gen", "Random connected cubic graphs");
    gen->add_option("--n", gen_n, "Vertices (even, >= 4)")->required();
    gen->add_option("--seed", seed, "First seed");
    gen->add_option("--count", count, "Number of graphs")->check(CLI::PositiveNumber);
    gen->add_option("--out", out_dir, "Output directory (stdout if omitted)");

    auto* contract = app.add_subcommand("contract", "Contract triangles");
    contract->add_option("--graph", graph_path, "Graph file")->required();

    auto* analyze = app.add_subcommand("analyze", "Speedup, threshold and negative-model tables");
    analyze->add_option("--c-grid", c_grid, "lo:hi:count");
    analyze->add_option("--model", model_path, "Space model JSON (calibrated if omitted)");
    analyze->add_option("--out", out_path, "Output file (stdout if omitted)");

    auto* verify = app.add_subcommand("verify", "Run a property suite");
    verify->add_option("--suite", suite, "encodings | setgen | eppstein | qsim | hybrid | all")->required();

    auto* trace = app.add_subcommand("trace", "Set-generation schedule of one Reduce run");
    trace->add_option("--graph", graph_path, "Graph file")->required();
    trace->add_flag("--emit-schedule", emit_schedule, "Include the per-block event list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    if (threads > 0) omp_set_num_threads(threads);

    auto load_model = [&]() -> std::optional<hybrid::SpaceModel> {
        if (model_path.empty()) return std::nullopt;
        std::ifstream f(model_path);
        if (!f) throw UsageError("cannot read model file " + model_path);
        return report::model_from_json(json::parse(f));
    };

    try {
        if (*solve) {
            report::SolveRequest req;
            req.mode = report::parse_mode(mode);
            if (req.mode == report::SolveMode::Hybrid) {
                if (c <= 0) throw UsageError("hybrid mode requires --c > 0");
                req.c = c;
                req.model = load_model();
            }
            req.oracle_check = oracle_check;
            const report::SolveResult res = report::solve_document(read_graph_file(graph_path), req);
            if (as_json) emit(res.doc, "");
            else print_plain(res.doc);
            if (res.oracle_mismatch) {
                std::cerr << "error: verdict disagrees with brute force\n";
                return kUsage;
            }
            return res.verdict ? 0 : 1;
        }
        if (*gen) {
            if (gen_n < 4 || gen_n % 2) throw UsageError("--n must be even and at least 4");
            if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
            for (uint32_t k = 0; k < count; ++k) {
                const std::string text = serialize_graph(random_cubic(gen_n, seed + k));
                if (out_dir.empty()) {
                    std::cout << text;
                    continue;
                }
                const auto path = std::filesystem::path(out_dir) /
                                  ("cubic_n" + std::to_string(gen_n) + "_s" + std::to_string(seed + k) + ".g");
                std::ofstream(path) << text;
                std::cout << path.string() << "\n";
            }
            return 0;
        }
        if (*contract) {
            const ParsedGraph pg = read_graph_file(graph_path);
            if (!pg.forced.empty()) std::cerr << "note: forced edges are dropped by contraction\n";
            std::cout << serialize_graph(contract_triangles(pg.g));
            return 0;
        }
        if (*analyze) {
            const report::CGrid grid = report::parse_c_grid(c_grid);
            std::optional<hybrid::CalibrationReport> cal;
            hybrid::SpaceModel model;
            if (auto m = load_model()) {
                model = *m;
            } else {
                hybrid::CalibrationReport rep;
                model = report::default_model(&rep);
                cal = rep;
            }
            if (grid.hi >= model.F_max()) throw UsageError("c-grid must stay below F(lambda~) = " + std::to_string(model.F_max()));
            emit(report::analyze_document(grid, model, cal), out_path);
            return 0;
        }
        if (*verify) {
            std::vector<std::string> names;
            if (suite == "all") names = report::suite_names();
            else names.push_back(suite);
            bool ok = true;
            for (const std::string& name : names) {
                const report::SuiteResult r = report::run_suite(name);
                std::cout << r.name << ": " << r.checks << " checks, " << r.failures.size() << " failed\n";
                for (const std::string& f : r.failures) std::cout << "  FAIL " << f << "\n";
                ok = ok && r.failures.empty();
            }
            return ok ? 0 : 1;
        }
        if (*trace) {
            json doc = report::schedule_document(read_graph_file(graph_path));
            if (!emit_schedule) doc.erase("events");
            emit(doc, "");
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
