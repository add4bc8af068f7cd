#include <algorithm>
#include <random>
#include <stdexcept>

#include "hfchc/eppstein.hpp"
#include "hfchc/errors.hpp"
#include "hfchc/qsim.hpp"

namespace hfchc::qsim {

uint32_t nu_length(int64_t s) {
    if (s < 0) throw std::invalid_argument("nu_length: negative size");
    return uint32_t(s / 2 + 4 * s);
}

namespace {

bool live_parallel(const FchcInstance& st) {
    const MultiGraph& g = st.graph();
    for (uint32_t v = 0; v < g.n(); ++v) {
        auto inc = g.incident(v);
        for (size_t a = 0; a < inc.size(); ++a)
            for (size_t b = a + 1; b < inc.size(); ++b)
                if (st.live(inc[a]) && st.live(inc[b]) && g.edge(inc[a]).other(v) == g.edge(inc[b]).other(v))
                    return true;
    }
    return false;
}

}  // namespace

Instance::Instance(FchcInstance base) : base_(std::move(base)) {
    if (base_.n() < 3) throw InstanceNotReduced("qsim: fewer than three vertices");
    if (live_parallel(base_)) throw InstanceNotReduced("qsim: parallel edges must be dropped first");
    if (!reduction_free(base_)) throw InstanceNotReduced("qsim: base instance admits a trivial reduction");
    s_ = size_metric(base_);
    r_ = nu_length(s_);
    N_ = 2 * base_.m() + std::max(base_.m(), r_);
}

FchcInstance apply_elements(const Instance& q, std::span<const uint32_t> X) {
    FchcInstance st = q.base();
    const uint32_t m = q.m();
    for (uint32_t x : X) {
        if (x == 0 || x > q.N()) throw ElementOutOfRange("qsim: element outside [1, N]");
        if (x <= m) st.force(x - 1);
        else if (x <= 2 * m) st.remove(x - 1 - m);
    }
    return st;
}

namespace {

bool has_forced_degree_one(const FchcInstance& st) {
    for (uint32_t v = 0; v < st.n(); ++v)
        if (st.forced_degree(v) == 1) return true;
    return false;
}

// Same conditions the recursive solver treats as terminal, minus the
// short-cycle rule, which the pipeline never uses.
bool dummy_case(const FchcInstance& st) {
    for (uint32_t v = 0; v < st.n(); ++v)
        if (st.live_degree(v) <= 1 || st.forced_degree(v) >= 3) return true;
    return free_collection(st);
}

}  // namespace

Step calculate(const Instance& q, const FchcInstance& st, uint32_t i, bool nu_i) {
    if (auto red = next_reduction(st)) {
        const uint8_t kase = uint8_t(red->rule - 'a' + 1);
        return {red->remove ? q.delete_elem(red->edge) : q.force_elem(red->edge), kase, false};
    }
    if (dummy_case(st)) return {q.dummy_elem(i), 4, false};
    auto branch = [&](uint32_t e, uint8_t kase) {
        return Step{nu_i ? q.delete_elem(e) : q.force_elem(e), kase, true};
    };
    if (auto s = select_3a(st)) return branch(s->edge, 5);
    if (has_forced_degree_one(st))
        if (auto s = select_3b(st)) return branch(s->edge, 6);
    if (auto s = select_3c(st)) return branch(s->edge, 7);
    // Not a free collection, so some free edge lies off every isolated cycle.
    throw std::logic_error("qsim::calculate: no case applies");
}

uint32_t Trace::ignored() const {
    return uint32_t(std::count(consumed.begin(), consumed.end(), uint8_t(0)));
}

Trace reduce(const Instance& q, std::span<const uint8_t> nu) {
    if (nu.size() != q.r()) throw std::invalid_argument("qsim::reduce: ν must have r bits");
    Trace t{{}, {}, {}, q.base()};
    const uint32_t m = q.m();
    for (uint32_t i = 1; i <= q.r(); ++i) {
        const Step s = calculate(q, t.final_state, i, nu[i - 1] != 0);
        t.X.push_back(s.element);
        t.cases.push_back(s.kase);
        t.consumed.push_back(s.uses_nu);
        if (s.element <= m) t.final_state.force(s.element - 1);
        else if (s.element <= 2 * m) t.final_state.remove(s.element - 1 - m);
    }
    return t;
}

bool adjacent(const Instance& q, const FchcInstance& st, uint32_t v, uint32_t w) {
    const MultiGraph& g = q.base().graph();
    for (uint32_t e : g.incident(v))
        if (g.edge(e).other(v) == w && st.live(e)) return true;
    return false;
}

bool check(const Instance& q, const FchcInstance& st) {
    (void)q;
    for (uint32_t v = 0; v < st.n(); ++v)
        if (st.live_degree(v) == 1 || st.forced_degree(v) >= 3) return false;
    return free_collection(st) && is_connected(st);
}

FchcInstance fixed_size_family(uint32_t n, uint32_t window, uint64_t seed) {
    if (window < 4 || window % 2 || n % 2 || n < window + 2)
        throw std::invalid_argument("fixed_size_family: need even window >= 4 and even n >= window + 2");
    std::mt19937_64 rng(seed);
    std::vector<uint32_t> outside;
    for (uint32_t v = window; v < n; ++v) outside.push_back(v);
    auto ring_adjacent = [n](uint32_t a, uint32_t b) { return (a + 1) % n == b || (b + 1) % n == a; };
    // With two outside vertices the only chord doubles a forced ring edge and
    // is dropped as a parallel duplicate.
    for (;;) {
        std::shuffle(outside.begin(), outside.end(), rng);
        bool ok = true;
        for (size_t k = 0; ok && k < outside.size() && outside.size() > 2; k += 2)
            ok = !ring_adjacent(outside[k], outside[k + 1]);
        if (ok) break;
    }
    MultiGraph g(n);
    std::vector<uint32_t> forced;
    for (uint32_t v = 0; v < n; ++v) {
        const uint32_t e = g.add_edge(v, (v + 1) % n);
        if (v >= window - 1) forced.push_back(e);
    }
    for (uint32_t j = 0; j < window / 2; ++j) g.add_edge(j, j + window / 2);
    for (size_t k = 0; k < outside.size(); k += 2) g.add_edge(outside[k], outside[k + 1]);
    auto inst = drop_parallel_duplicates(FchcInstance(g, forced));
    triv_red(*inst);
    return *inst;
}

}  // namespace hfchc::qsim
