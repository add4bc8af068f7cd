// Serial vs OpenMP kernels on the two embarrassingly parallel workloads:
// the ν search over one instance and a sweep of the solver over a corpus.

#include <benchmark/benchmark.h>

#include <random>

#include "hfchc/eppstein.hpp"
#include "hfchc/qsim.hpp"

using namespace hfchc;

namespace {

// A reduced base whose ν string has exactly `want` bits. Only some lengths
// occur (4, 9, 13, 18, ...), so `want` must be one of them. A rejecting base
// makes exhaustive search sweep all 2^r strings.
qsim::Instance instance_with_r(uint32_t want, bool rejecting = false) {
    std::mt19937_64 rng(want);
    for (;;) {
        FchcInstance inst(random_cubic(8 + 2 * uint32_t(rng() % 4), rng()));
        for (uint32_t e = 0; e < inst.m(); ++e)
            if (rng() % 3 == 0 && inst.forced_degree(inst.graph().edge(e).u) < 2 &&
                inst.forced_degree(inst.graph().edge(e).v) < 2)
                inst.force(e);
        auto root = drop_parallel_duplicates(inst);
        if (!root) continue;
        triv_red(*root);
        qsim::Instance q(*root);
        if (q.r() == want && (!rejecting || !solve(*root).result)) return q;
    }
}

const std::vector<FchcInstance>& sweep_corpus() {
    static const std::vector<FchcInstance> insts = [] {
        std::vector<FchcInstance> out;
        for (uint32_t n = 6; n <= 12; n += 2)
            for (const MultiGraph& g : cubic_corpus(n)) out.emplace_back(g);
        for (uint64_t k = 0; k < 200; ++k) out.emplace_back(random_cubic(16 + 2 * uint32_t(k % 8), k));
        return out;
    }();
    return insts;
}

void BM_NuExhaustive(benchmark::State& state) {
    const qsim::Instance q = instance_with_r(uint32_t(state.range(0)), true);
    qsim::SearchOptions opt;
    opt.mode = qsim::Mode::Exhaustive;
    opt.parallel = state.range(1) != 0;
    uint64_t evaluated = 0;
    for (auto _ : state) {
        const qsim::SearchReport rep = qsim::enumerate_search(q, opt);
        benchmark::DoNotOptimize(rep.found);
        evaluated += rep.evaluated;
    }
    // The search stops at the first witness, so count what it actually ran.
    state.SetItemsProcessed(int64_t(evaluated));
}

void BM_NuSampled(benchmark::State& state) {
    const qsim::Instance q = instance_with_r(18);
    qsim::SearchOptions opt;
    opt.mode = qsim::Mode::Sampled;
    opt.trials = 20000;
    opt.parallel = state.range(0) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(qsim::enumerate_search(q, opt).hits);
    state.SetItemsProcessed(int64_t(state.iterations() * opt.trials));
}

void BM_CorpusSweep(benchmark::State& state) {
    const auto& insts = sweep_corpus();
    SolveOptions opt;
    opt.short_circuit = false;
    for (auto _ : state) benchmark::DoNotOptimize(solve_all(insts, opt, state.range(0) != 0).size());
    state.SetItemsProcessed(int64_t(state.iterations() * insts.size()));
}

void BM_BranchTasks(benchmark::State& state) {
    const FchcInstance inst(random_cubic(40, 5));
    SolveOptions opt;
    opt.short_circuit = false;
    opt.task_depth = 6;
    const bool parallel = state.range(0) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(parallel ? solve(inst, opt).stats.nodes_visited
                                          : solve_serial(inst, opt).stats.nodes_visited);
}

}  // namespace

BENCHMARK(BM_NuExhaustive)->ArgsProduct({{9, 13}, {0, 1}})->ArgNames({"r", "omp"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NuSampled)->Arg(0)->Arg(1)->ArgName("omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CorpusSweep)->Arg(0)->Arg(1)->ArgName("omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BranchTasks)->Arg(0)->Arg(1)->ArgName("omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
