#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hfchc/eppstein.hpp"
#include "hfchc/errors.hpp"
#include "hfchc/qsim.hpp"

namespace hfchc::qsim {

namespace {

// ν as an integer with ν_1 the most significant bit, so numeric order is
// lexicographic order of the string.
std::vector<uint8_t> nu_of(uint64_t u, uint32_t r) {
    std::vector<uint8_t> nu(r);
    for (uint32_t i = 0; i < r; ++i) nu[i] = uint8_t((u >> (r - 1 - i)) & 1);
    return nu;
}

bool accepts(const Instance& q, const std::vector<uint8_t>& nu) {
    return check(q, reduce(q, nu).final_state);
}

void finish(const Instance& q, SearchReport& rep) {
    if (rep.found) {
        const Trace t = reduce(q, rep.witness);
        rep.t_measured = t.ignored();
        rep.branch_bits = q.r() - rep.t_measured;
    }
    rep.grover_estimate = grover_cost_model(rep, q).iterations;
}

SearchReport exhaustive(const Instance& q, const SearchOptions& opt) {
    const uint32_t r = q.r();
    if (r > opt.exhaustive_limit || r >= 63)
        throw SearchSpaceTooLarge("exhaustive search over 2^" + std::to_string(r) + " strings exceeds the limit");
    const int64_t total = int64_t(1) << r;
    int64_t best = total, ran = 0;
    // Strings above a thread's best witness are skipped, so `ran` depends on
    // the thread count; the witness (the smallest one) does not.
#pragma omp parallel for schedule(static) reduction(min : best) reduction(+ : ran) if (opt.parallel)
    for (int64_t u = 0; u < total; ++u)
        if (u < best) {
            ++ran;
            if (accepts(q, nu_of(uint64_t(u), r))) best = u;
        }
    SearchReport rep;
    rep.r = r;
    rep.evaluated = uint64_t(ran);
    rep.found = best < total;
    if (rep.found) rep.witness = nu_of(uint64_t(best), r);
    return rep;
}

// Depth-first over the bits that decide branches; ignored bits stay 0. Bit 0
// is explored first, so the first accepting leaf is the smallest witness.
struct Pruned {
    const Instance& q;
    uint64_t leaves = 0;
    std::vector<uint8_t> nu;

    bool run(FchcInstance st, uint32_t i) {
        const uint32_t m = q.m();
        for (; i <= q.r(); ++i) {
            const Step s = calculate(q, st, i, false);
            if (s.uses_nu) {
                for (uint8_t bit = 0; bit < 2; ++bit) {
                    nu[i - 1] = bit;
                    FchcInstance child = st;
                    // With ν_i = 0 the step forces edge element - 1.
                    if (bit) child.remove(s.element - 1);
                    else child.force(s.element - 1);
                    if (run(std::move(child), i + 1)) return true;
                }
                nu[i - 1] = 0;
                return false;
            }
            if (s.element <= m) st.force(s.element - 1);
            else if (s.element <= 2 * m) st.remove(s.element - 1 - m);
        }
        ++leaves;
        return check(q, st);
    }
};

SearchReport branch_pruned(const Instance& q) {
    Pruned p{q, 0, std::vector<uint8_t>(q.r(), 0)};
    SearchReport rep;
    rep.r = q.r();
    rep.found = p.run(q.base(), 1);
    rep.evaluated = p.leaves;
    if (rep.found) rep.witness = p.nu;
    return rep;
}

SearchReport sampled(const Instance& q, const SearchOptions& opt) {
    const uint32_t r = q.r();
    const int64_t trials = int64_t(opt.trials);
    int64_t best_trial = trials;
    uint64_t hits = 0;
    // Each trial seeds its own generator, so the draw does not depend on
    // how trials are spread over threads.
    auto draw = [&](int64_t k) {
        std::seed_seq seq{uint64_t(opt.seed), uint64_t(k)};
        std::mt19937_64 rng(seq);
        std::vector<uint8_t> nu(r);
        for (auto& b : nu) b = uint8_t(rng() & 1);
        return nu;
    };
#pragma omp parallel for schedule(static) reduction(+ : hits) reduction(min : best_trial) if (opt.parallel)
    for (int64_t k = 0; k < trials; ++k) {
        if (accepts(q, draw(k))) {
            ++hits;
            best_trial = std::min(best_trial, k);
        }
    }
    SearchReport rep;
    rep.r = r;
    rep.evaluated = uint64_t(trials);
    rep.hits = hits;
    rep.found = hits > 0;
    if (rep.found) rep.witness = draw(best_trial);
    return rep;
}

}  // namespace

SearchReport enumerate_search(const Instance& q, const SearchOptions& opt) {
    SearchReport rep;
    switch (opt.mode) {
    case Mode::Exhaustive: rep = exhaustive(q, opt); break;
    case Mode::BranchPruned: rep = branch_pruned(q); break;
    case Mode::Sampled: rep = sampled(q, opt); break;
    }
    finish(q, rep);
    return rep;
}

GroverEstimate grover_cost_model(const SearchReport& report, const Instance& q) {
    const uint32_t bits = report.found ? report.branch_bits : report.r;
    const long double v = std::ceil(std::numbers::pi_v<long double> / 4 * std::exp2((long double)bits / 2));
    const long double cap = (long double)std::numeric_limits<uint64_t>::max();
    GroverEstimate g;
    g.iterations = v >= cap ? std::numeric_limits<uint64_t>::max() : uint64_t(v);
    g.no_witness = !report.found;
    g.within_bound = report.found && int64_t(report.branch_bits) <= (q.s() + 1) / 2;
    return g;
}

PipelineResult solve_pipeline(const FchcInstance& inst, const SearchOptions& opt) {
    if (inst.n() < 3) return {brute_force_fchc(inst), std::nullopt, 0};
    auto prepared = drop_parallel_duplicates(inst);
    if (!prepared) return {false, std::nullopt, 0};
    FchcInstance root = std::move(*prepared);
    triv_red(root);
    const Instance q(std::move(root));
    SearchReport rep = enumerate_search(q, opt);
    const bool found = rep.found;
    return {found, std::move(rep), q.s()};
}

}  // namespace hfchc::qsim
