#include "hfchc/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hfchc/encoding.hpp"
#include "hfchc/eppstein.hpp"
#include "hfchc/errors.hpp"
#include "hfchc/qsim.hpp"
#include "hfchc/setgen.hpp"

namespace hfchc::report {

using nlohmann::json;

SolveMode parse_mode(const std::string& name) {
    if (name == "classical") return SolveMode::Classical;
    if (name == "nonrecursive") return SolveMode::NonRecursive;
    if (name == "hybrid") return SolveMode::Hybrid;
    throw std::invalid_argument("unknown mode '" + name + "'");
}

std::string mode_name(SolveMode mode) {
    switch (mode) {
    case SolveMode::Classical: return "classical";
    case SolveMode::NonRecursive: return "nonrecursive";
    case SolveMode::Hybrid: return "hybrid";
    }
    return "?";
}

uint32_t oracle_limit() {
    if (const char* v = std::getenv("HYBRID_FCHC_ORACLE_LIMIT")) {
        char* end = nullptr;
        const unsigned long x = std::strtoul(v, &end, 10);
        if (end != v && *end == '\0' && x > 0 && x < 64) return uint32_t(x);
        throw std::invalid_argument("HYBRID_FCHC_ORACLE_LIMIT must be an integer in [1, 63]");
    }
    return 20;
}

// ---------------------------------------------------------------- solve

namespace {

std::optional<FchcInstance> prepared_root(const FchcInstance& inst) {
    if (inst.n() < 3) return std::nullopt;
    auto root = drop_parallel_duplicates(inst);
    if (root) triv_red(*root);
    return root;
}

json null_stats() {
    return {{"nodes", 0},        {"depth", 0},          {"tau_sum", nullptr},  {"r", nullptr},
            {"t", nullptr},      {"grover_estimate", nullptr}, {"peak_cells", nullptr}};
}

bool classical_stats(const FchcInstance& inst, json& stats) {
    const Verdict v = solve(inst);
    stats["nodes"] = v.stats.nodes_visited;
    stats["depth"] = v.stats.max_depth;
    if (v.result && !v.stats.accepting.empty())
        stats["tau_sum"] = v.stats.root_tau + v.stats.accepting.front().tau_sum;
    return v.result;
}

bool nonrecursive_stats(const FchcInstance& inst, json& stats) {
    const qsim::PipelineResult res = qsim::solve_pipeline(inst);
    if (!res.report) return res.verdict;
    const qsim::SearchReport& rep = *res.report;
    const qsim::Instance q(*prepared_root(inst));
    stats["nodes"] = rep.evaluated;
    stats["r"] = rep.r;
    stats["grover_estimate"] = rep.grover_estimate;
    if (q.r() > 0) stats["peak_cells"] = qsim::qubit_accounting(q).total_cells;
    if (rep.found) {
        const qsim::Trace t = qsim::reduce(q, rep.witness);
        stats["depth"] = rep.branch_bits;
        stats["t"] = rep.t_measured;
        stats["tau_sum"] = std::count_if(t.cases.begin(), t.cases.end(), [](uint8_t c) { return c <= 3; });
    }
    return res.verdict;
}

bool hybrid_stats(const FchcInstance& inst, const SolveRequest& req, json& stats) {
    const hybrid::SpaceModel& model = req.model ? *req.model : default_model();
    const hybrid::HybridVerdict v = hybrid::hybrid_solve(inst, hybrid::HybridConfig{req.c}, model);
    const hybrid::HybridStats& st = v.stats;
    stats["nodes"] = st.classical_nodes;
    stats["depth"] = st.max_depth;
    const auto depth = st.handoff_depth();
    stats["handoff_depth"] = depth ? json(*depth) : json(nullptr);
    stats["handoffs"] = st.handoffs.size();
    stats["s_tilde"] = st.s_tilde;
    stats["budget_bits"] = st.budget;
    stats["budget_too_small"] = st.budget_too_small;
    stats["refused"] = st.refused;
    stats["modeled_cost"] = st.modeled_cost();
    for (const hybrid::Handoff& h : st.handoffs)
        if (h.verdict) {
            stats["r"] = h.r;
            stats["t"] = h.t;
            stats["grover_estimate"] = h.grover_estimate;
            break;
        }
    return v.result;
}

}  // namespace

SolveResult solve_document(const ParsedGraph& pg, const SolveRequest& req) {
    const auto t0 = std::chrono::steady_clock::now();
    const FchcInstance inst(pg.g, pg.forced);
    json stats = null_stats();
    bool verdict = false;
    switch (req.mode) {
    case SolveMode::Classical: verdict = classical_stats(inst, stats); break;
    case SolveMode::NonRecursive: verdict = nonrecursive_stats(inst, stats); break;
    case SolveMode::Hybrid: verdict = hybrid_stats(inst, req, stats); break;
    }
    const auto root = prepared_root(inst);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    SolveResult out{verdict, false, {}};
    out.doc = {{"schema_version", kSchemaVersion},
               {"verdict", verdict},
               {"n", inst.n()},
               {"m", inst.m()},
               {"s", root ? size_metric(*root) : 0},
               {"mode", mode_name(req.mode)},
               {"stats", stats},
               {"timings", {{"total_ms", ms}}}};
    if (req.oracle_check) {
        const uint32_t limit = oracle_limit();
        json oracle = {{"limit", limit}, {"checked", inst.n() <= limit}};
        if (inst.n() <= limit) {
            const bool truth = brute_force_fchc(inst, limit);
            oracle["agrees"] = truth == verdict;
            out.oracle_mismatch = truth != verdict;
        }
        out.doc["oracle"] = oracle;
    }
    return out;
}

// ---------------------------------------------------------------- models

json model_to_json(const hybrid::SpaceModel& m) {
    return {{"schema_version", kSchemaVersion}, {"A", m.A}, {"B", m.B}, {"a", m.a}};
}

hybrid::SpaceModel model_from_json(const json& j) {
    return {j.at("A").get<double>(), j.at("B").get<double>(), j.at("a").get<double>()};
}

const hybrid::SpaceModel& default_model(hybrid::CalibrationReport* report) {
    static hybrid::CalibrationReport rep;
    static const hybrid::SpaceModel model = [] {
        std::vector<FchcInstance> insts;
        for (uint32_t n = 6; n <= 12; n += 2)
            for (const MultiGraph& g : cubic_corpus(n)) insts.emplace_back(g);
        for (uint32_t n = 8; n <= 40; n += 8) insts.push_back(qsim::fixed_size_family(n, 6, n));
        return hybrid::calibrate(hybrid::measure_space(insts, 1), &rep);
    }();
    if (report) *report = rep;
    return model;
}

// ---------------------------------------------------------------- analyze

CGrid parse_c_grid(const std::string& spec) {
    const size_t p1 = spec.find(':'), p2 = spec.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw std::invalid_argument("c-grid must look like lo:hi:count");
    CGrid g{};
    size_t used = 0;
    try {
        g.lo = std::stod(spec.substr(0, p1));
        g.hi = std::stod(spec.substr(p1 + 1, p2 - p1 - 1));
        const std::string cnt = spec.substr(p2 + 1);
        const long count = std::stol(cnt, &used);
        if (used != cnt.size() || count < 1 || count > 100000) throw std::invalid_argument("count");
        g.count = uint32_t(count);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("c-grid must look like lo:hi:count with 0 < lo <= hi and count >= 1");
    }
    if (!(g.lo > 0 && g.lo <= g.hi)) throw std::invalid_argument("c-grid needs 0 < lo <= hi");
    return g;
}

json analyze_document(const CGrid& grid, const hybrid::SpaceModel& model,
                      const std::optional<hybrid::CalibrationReport>& calibration) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["model"] = {{"A", model.A}, {"B", model.B}, {"a", model.a}, {"lambda_tilde", model.lambda_tilde()},
                    {"F_max", model.F_max()}};
    if (calibration) {
        const auto& c = *calibration;
        doc["calibration"] = {{"points", c.points},
                              {"raw", {{"A", c.raw.A}, {"B", c.raw.B}, {"a", c.raw.a}}},
                              {"inflation", c.inflation},
                              {"rms_residual_bits", c.rms_residual},
                              {"r_squared", c.r_squared},
                              {"coverage", c.coverage}};
    } else {
        doc["calibration"] = nullptr;
    }

    std::vector<uint32_t> ns;
    for (uint32_t e = 6; e <= 20; e += 2) ns.push_back(1u << e);
    json speedup = json::array(), thresholds = json::array(), negative = json::array();
    for (const hybrid::SpeedupRow& row : hybrid::speedup_table(model, grid.lo, grid.hi, grid.count)) {
        speedup.push_back({{"c", row.c}, {"lambda", row.lambda}, {"f", row.f}});
        const hybrid::HybridConfig cfg{row.c};
        for (const hybrid::ThresholdRow& t : hybrid::threshold_table(cfg, model, ns))
            thresholds.push_back({{"c", row.c},
                                  {"n", t.n},
                                  {"s_tilde", t.s_tilde ? json(*t.s_tilde) : json(nullptr)},
                                  {"linear_part", t.linear_part}});
        for (const hybrid::NegativeRow& r : hybrid::negative_table(cfg, model, ns))
            negative.push_back({{"c", row.c}, {"n", r.n}, {"exponent", r.exponent}, {"gap", r.gap}, {"f_c", r.f_c}});
    }
    doc["speedup"] = speedup;
    doc["threshold"] = thresholds;
    doc["negative_model"] = negative;
    json ball = json::object();
    for (uint32_t d : {4u, 8u, 16u})
        ball[std::to_string(d)] = hybrid::recurrence_exponent(hybrid::ball_sat_framework(d));
    doc["recurrence"] = {{"eppstein", hybrid::recurrence_exponent(hybrid::eppstein_framework())},
                         {"ball_sat", ball}};
    return doc;
}

// ---------------------------------------------------------------- trace

json schedule_document(const ParsedGraph& pg) {
    const FchcInstance inst(pg.g, pg.forced);
    json doc = {{"schema_version", kSchemaVersion}, {"n", inst.n()}, {"r", 0}, {"events", json::array()}};
    const auto root = prepared_root(inst);
    if (!root) return doc;
    const qsim::Instance q(*root);
    if (q.r() == 0) return doc;

    const qsim::SearchReport rep = qsim::enumerate_search(q);
    const std::vector<uint8_t> nu = rep.found ? rep.witness : std::vector<uint8_t>(q.r(), 0);
    Machine m;
    LevelAudit audit;
    audit.attach(m);
    const RegisterRef nr = m.alloc(q.r(), 2, RegKind::Input);
    m.write(nr, nu);
    const RegisterRef eff = m.alloc(eff_width(q.N(), q.r()), 3, RegKind::Output);
    const ProgramPtr red = qsim::reduce_prog(q);
    m.run(*red, {nr, eff});
    const std::vector<uint32_t> X = decode_eff(q.N(), q.r(), m.read(eff));
    const uint64_t calls = m.calculate_calls();
    m.run(*red, {nr, eff}, true);

    json events = json::array();
    for (const LevelEvent& e : audit.events())
        if (!e.inverse) events.push_back({{"i", e.i}, {"l", e.l}, {"calls", e.calls}});
    doc["r"] = q.r();
    doc["N"] = q.N();
    doc["nu"] = nu;
    doc["accepting"] = rep.found;
    doc["events"] = events;
    doc["calculate_calls"] = calls;
    doc["call_bound"] = GenPlan::make(q.r()).call_bound();
    doc["elements"] = X;
    return doc;
}

// ---------------------------------------------------------------- suites

namespace {

class Suite {
public:
    explicit Suite(std::string name) { res_.name = std::move(name); }
    void check(bool ok, const std::string& what) {
        ++res_.checks;
        if (!ok && res_.failures.size() < 50) res_.failures.push_back(what);
    }
    SuiteResult done() { return std::move(res_); }

private:
    SuiteResult res_;
};

std::vector<FchcInstance> corpus_upto(uint32_t n_max) {
    std::vector<FchcInstance> out;
    for (uint32_t n = 4; n <= n_max; n += 2)
        for (const MultiGraph& g : cubic_corpus(n)) out.emplace_back(g);
    for (const char* name : {"k33", "q3", "petersen"}) out.emplace_back(named_graph(name));
    return out;
}

SuiteResult encodings_suite() {
    Suite s("encodings");
    s.check(to_string(encode_basic(20, {6, 7, 10, 15, 17})) == "110212112101210200000", "worked example");
    for (uint32_t N = 1; N <= 12; ++N)
        for (uint32_t mask = 1; mask < (1u << N); ++mask) {
            std::vector<uint32_t> S;
            for (uint32_t b = 0; b < N; ++b)
                if (mask >> b & 1) S.push_back(b + 1);
            const uint32_t k = uint32_t(S.size());
            const bool basic_ok = decode_basic(N, k, encode_basic(N, S)) == S;
            std::vector<uint32_t> back = decode_eff(N, k, encode_eff(N, S).flat());
            std::sort(back.begin(), back.end());
            if (!basic_ok || back != S) s.check(false, "round trip N=" + std::to_string(N) + " mask=" + std::to_string(mask));
        }
    s.check(true, "round trips N <= 12");
    for (uint32_t N = 1; N <= 64; ++N)
        for (uint32_t k = 1; k <= N; ++k)
            s.check(eff_width(N, k) <= eff_bound(N, k), "eff bound N=" + std::to_string(N) + " k=" + std::to_string(k));

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const uint32_t N = 4 + uint32_t(rng() % 28), k = 1 + uint32_t(rng() % std::min(N, 6u));
        std::vector<uint32_t> all(N);
        std::iota(all.begin(), all.end(), 1u);
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<uint32_t> S(all.begin(), all.begin() + k);
        Machine m(Machine::Options{.use_shortcuts = false});
        const auto enc = m.alloc(capacity(N, k), 3, RegKind::Input);
        m.write(enc, encode_basic(N, S));
        const auto x = m.alloc(bitlen(N), 2, RegKind::Input);
        const uint32_t probe = 1 + uint32_t(rng() % N);
        m.write_uint(x, probe);
        const auto out = m.alloc(1, 2, RegKind::Output);
        const auto before = m.snapshot();
        const ProgramPtr p = contains_prog(N, k);
        m.run(*p, {enc, x, out});
        const bool member = std::find(S.begin(), S.end(), probe) != S.end();
        s.check(m.read(out)[0] == uint8_t(member), "contains answer");
        m.run(*p, {enc, x, out}, true);
        s.check(m.snapshot() == before, "contains inverse restores registers");
    }
    return s.done();
}

SuiteResult setgen_suite() {
    Suite s("setgen");
    std::mt19937_64 rng(2);
    for (uint32_t r = 1; r <= 9; ++r) {
        const uint32_t N = 3 * r + 4, nu_width = std::min(r, 4u);
        std::vector<std::vector<uint32_t>> script(size_t(1) << nu_width);
        for (auto& row : script) {
            std::vector<uint32_t> all(N);
            std::iota(all.begin(), all.end(), 1u);
            std::shuffle(all.begin(), all.end(), rng);
            row.assign(all.begin(), all.begin() + r);
        }
        SetGenerator gen(scripted_family(N, r, nu_width, script));
        const ProgramPtr p = gen.generate();
        for (uint64_t u = 0; u < script.size(); u += 3) {
            Machine m;
            LevelAudit audit;
            audit.attach(m);
            const auto rn = m.alloc(nu_width, 2, RegKind::Input);
            const auto out = m.alloc(eff_width(N, r), 3, RegKind::Output);
            m.write_uint(rn, u);
            const auto before = m.snapshot();
            m.run(*p, {rn, out});
            std::vector<uint32_t> got = decode_eff(N, r, m.read(out)), want = script[u];
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            const std::string tag = " r=" + std::to_string(r) + " u=" + std::to_string(u);
            s.check(got == want, "generated set" + tag);
            s.check(m.calculate_calls() == gen.plan().total_calls(), "total calls" + tag);
            s.check(gen.plan().total_calls() <= gen.plan().call_bound(), "call bound" + tag);
            for (const LevelEvent& e : audit.events())
                s.check(e.calls == GenPlan::level_calls(e.l), "level calls" + tag);
            m.run(*p, {rn, out}, true);
            s.check(m.snapshot() == before && m.live_width() == 0, "inverse" + tag);
        }
    }
    return s.done();
}

SuiteResult eppstein_suite() {
    Suite s("eppstein");
    for (const FchcInstance& inst : corpus_upto(12)) {
        const bool truth = brute_force_fchc(inst);
        s.check(solve(inst).result == truth, "verdict n=" + std::to_string(inst.n()));
        SolveOptions full;
        full.short_circuit = false;
        const Verdict v = solve(inst, full);
        try {
            audit_branch_decrease(v.stats);
            s.check(true, "audit");
        } catch (const AuditFailure& e) {
            s.check(false, e.what());
        }
    }
    return s.done();
}

SuiteResult qsim_suite() {
    Suite s("qsim");
    for (const FchcInstance& inst : corpus_upto(12)) {
        const bool truth = brute_force_fchc(inst);
        const qsim::PipelineResult res = qsim::solve_pipeline(inst);
        s.check(res.verdict == truth, "pipeline verdict n=" + std::to_string(inst.n()));
        if (res.report && res.report->found) {
            const auto root = prepared_root(inst);
            s.check(qsim::grover_cost_model(*res.report, qsim::Instance(*root)).within_bound, "branch bits bound");
        }
    }
    // Circuit Reduce and Check against the classical pipeline on small bases.
    std::mt19937_64 rng(3);
    int done = 0;
    for (uint64_t seed = 0; done < 3 && seed < 200; ++seed) {
        FchcInstance inst(random_cubic(8, seed));
        for (uint32_t e = 0; e < inst.m(); ++e)
            if (rng() % 3 == 0 && inst.forced_degree(inst.graph().edge(e).u) < 2 &&
                inst.forced_degree(inst.graph().edge(e).v) < 2)
                inst.force(e);
        auto root = drop_parallel_duplicates(inst);
        if (!root) continue;
        triv_red(*root);
        const qsim::Instance q(*root);
        if (q.r() == 0 || q.r() > 13) continue;
        ++done;
        const ProgramPtr red = qsim::reduce_prog(q), chk = qsim::check_prog(q);
        for (int k = 0; k < 16; ++k) {
            std::vector<uint8_t> nu(q.r());
            for (auto& b : nu) b = uint8_t(rng() & 1);
            const qsim::Trace t = qsim::reduce(q, nu);
            Machine m;
            const auto nr = m.alloc(q.r(), 2, RegKind::Input);
            m.write(nr, nu);
            const auto eff = m.alloc(eff_width(q.N(), q.r()), 3, RegKind::Output);
            const auto out = m.alloc(1, 2, RegKind::Output);
            const auto before = m.snapshot();
            m.run(*red, {nr, eff});
            std::vector<uint32_t> got = decode_eff(q.N(), q.r(), m.read(eff)), want = t.X;
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            s.check(got == want, "reduce circuit set");
            m.run(*chk, {eff, out});
            s.check(m.read(out)[0] == uint8_t(qsim::check(q, t.final_state)), "check circuit");
            m.run(*chk, {eff, out}, true);
            m.run(*red, {nr, eff}, true);
            s.check(m.snapshot() == before, "reduce and check inverse");
        }
    }
    s.check(done == 3, "found small circuit instances");
    return s.done();
}

SuiteResult hybrid_suite() {
    Suite s("hybrid");
    for (int k = 0; k <= 200; ++k) {
        const double x = -std::exp(-1.0) * std::pow(10.0, -k / 2.0);
        const double w = hybrid::lambert_w_m1(x);
        s.check(std::abs(w * std::exp(w) - x) < 1e-12 * std::abs(x), "lambert residual");
    }
    const hybrid::SpaceModel unit{1, 1, 0};
    for (double c : {0.01, 0.05, 0.1})
        s.check(std::abs(unit.F(hybrid::f_inverse(c, unit)) - c) <= 1e-10, "F round trip");
    s.check(std::abs(hybrid::recurrence_exponent(hybrid::eppstein_framework()) - 1.0 / 3) <= 1e-9, "one third");
    for (uint32_t d : {4u, 8u, 16u})
        s.check(std::abs(hybrid::recurrence_exponent(hybrid::ball_sat_framework(d)) - (1 + 2 * std::log2(3.0 * d) / d)) <=
                    1e-6,
                "ball-sat exponent");
    const hybrid::SpaceModel& model = default_model();
    for (const FchcInstance& inst : corpus_upto(12))
        for (double c : {0.25, 80.0}) {
            const hybrid::HybridVerdict v = hybrid::hybrid_solve(inst, hybrid::HybridConfig{c}, model);
            s.check(v.result == solve(inst).result, "hybrid verdict");
            for (const hybrid::Handoff& h : v.stats.handoffs)
                s.check(h.s <= v.stats.s_tilde && h.space_bits <= v.stats.budget, "handoff budget");
        }
    return s.done();
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"encodings", "setgen", "eppstein", "qsim", "hybrid"};
    return names;
}

SuiteResult run_suite(const std::string& name) {
    if (name == "encodings") return encodings_suite();
    if (name == "setgen") return setgen_suite();
    if (name == "eppstein") return eppstein_suite();
    if (name == "qsim") return qsim_suite();
    if (name == "hybrid") return hybrid_suite();
    throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace hfchc::report
