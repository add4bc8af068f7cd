#include "hfchc/eppstein.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "hfchc/errors.hpp"

namespace hfchc {

namespace {

uint32_t free_degree(const FchcInstance& inst, uint32_t v) {
    uint32_t d = 0;
    for (uint32_t e : inst.graph().incident(v)) d += inst.free(e);
    return d;
}

bool cycle_all_free(const FchcInstance& inst, const FourCycle& c) {
    return inst.free(c.e[0]) && inst.free(c.e[1]) && inst.free(c.e[2]) && inst.free(c.e[3]);
}

// Lowest free edge at v that is not an edge of c.
std::optional<uint32_t> free_spoke(const FchcInstance& inst, const FourCycle& c, uint32_t v) {
    for (uint32_t e : inst.graph().incident(v))
        if (inst.free(e) && !c.has_edge(e)) return e;
    return std::nullopt;
}

}  // namespace

std::optional<ReductionStep> next_reduction(const FchcInstance& inst) {
    const MultiGraph& g = inst.graph();
    for (uint32_t v = 0; v < g.n(); ++v) {
        if (inst.live_degree(v) != 2) continue;
        for (uint32_t e : g.incident(v))
            if (inst.free(e)) return ReductionStep{e, false, 'a'};
    }
    for (uint32_t v = 0; v < g.n(); ++v) {
        if (inst.live_degree(v) != 3 || inst.forced_degree(v) != 2) continue;
        for (uint32_t e : g.incident(v))
            if (inst.free(e)) return ReductionStep{e, true, 'b'};
    }
    for (const FourCycle& c : inst.data().cycles) {
        if (!cycle_all_free(inst, c)) continue;
        for (uint32_t p = 0; p < 2; ++p) {
            if (inst.forced_degree(c.v[p]) == 0 || inst.forced_degree(c.v[p + 2]) == 0) continue;
            auto a = free_spoke(inst, c, c.v[p + 1]), b = free_spoke(inst, c, c.v[(p + 3) % 4]);
            if (a || b) return ReductionStep{std::min(a.value_or(UINT32_MAX), b.value_or(UINT32_MAX)), false, 'c'};
        }
    }
    return std::nullopt;
}

uint32_t triv_red(FchcInstance& inst) {
    uint32_t tau = 0;
    while (auto step = next_reduction(inst)) {
        if (step->remove) inst.remove(step->edge);
        else inst.force(step->edge);
        ++tau;
    }
    return tau;
}

bool reduction_free(const FchcInstance& inst) { return !next_reduction(inst).has_value(); }

bool free_collection(const FchcInstance& inst) {
    const MultiGraph& g = inst.graph();
    for (uint32_t v = 0; v < g.n(); ++v) {
        const uint32_t d = free_degree(inst, v);
        if (d != 0 && d != 2) return false;
    }
    // Every component of a 2-regular free graph is a cycle; each must have 4 vertices.
    std::vector<bool> seen(g.n(), false);
    for (uint32_t s = 0; s < g.n(); ++s) {
        if (seen[s] || free_degree(inst, s) == 0) continue;
        uint32_t size = 0;
        std::vector<uint32_t> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            const uint32_t v = stack.back();
            stack.pop_back();
            ++size;
            for (uint32_t e : g.incident(v)) {
                if (!inst.free(e)) continue;
                const uint32_t w = g.edge(e).other(v);
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        if (size != 4) return false;
    }
    return true;
}

bool in_isolated_cycle(const FchcInstance& inst, uint32_t e) {
    if (!inst.free(e)) return false;
    for (uint32_t ci : inst.data().cycles_of_edge[e]) {
        const FourCycle& c = inst.data().cycles[ci];
        if (!cycle_all_free(inst, c)) continue;
        if (std::all_of(c.v.begin(), c.v.end(), [&](uint32_t v) { return free_degree(inst, v) == 2; })) return true;
    }
    return false;
}

bool has_nonhamiltonian_forced_cycle(const FchcInstance& inst) {
    const MultiGraph& g = inst.graph();
    std::vector<bool> seen(g.n(), false);
    for (uint32_t s = 0; s < g.n(); ++s) {
        if (seen[s] || inst.forced_degree(s) == 0) continue;
        uint32_t size = 0;
        bool closed = true;
        std::vector<uint32_t> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            const uint32_t v = stack.back();
            stack.pop_back();
            ++size;
            closed &= inst.forced_degree(v) == 2;
            for (uint32_t e : g.incident(v)) {
                if (!inst.forced(e)) continue;
                const uint32_t w = g.edge(e).other(v);
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        if (closed && size < g.n()) return true;
    }
    return false;
}

TerminalResult terminal_check(const FchcInstance& inst, bool use_short_cycle_rule) {
    for (uint32_t v = 0; v < inst.n(); ++v)
        if (inst.live_degree(v) <= 1) return {false, TerminalKind::LowDegree};
    for (uint32_t v = 0; v < inst.n(); ++v)
        if (inst.forced_degree(v) >= 3) return {false, TerminalKind::ThreeForced};
    if (free_collection(inst)) return {is_connected(inst), TerminalKind::Collection};
    if (use_short_cycle_rule && has_nonhamiltonian_forced_cycle(inst)) return {false, TerminalKind::ShortCycle};
    return {};
}

std::optional<Selection> select_3a(const FchcInstance& inst) {
    for (const FourCycle& c : inst.data().cycles) {
        if (!cycle_all_free(inst, c)) continue;
        std::vector<uint32_t> bare;
        for (uint32_t v : c.v)
            if (inst.forced_degree(v) == 0) bare.push_back(v);
        if (bare.size() != 2) continue;
        std::sort(bare.begin(), bare.end());
        for (uint32_t y : bare)
            if (auto e = free_spoke(inst, c, y)) return Selection{*e, SelectCase::A};
    }
    return std::nullopt;
}

std::optional<Selection> select_3b(const FchcInstance& inst) {
    const MultiGraph& g = inst.graph();
    for (uint32_t y = 0; y < g.n(); ++y) {
        if (inst.forced_degree(y) == 0) continue;
        for (uint32_t e : g.incident(y))
            if (inst.free(e) && !in_isolated_cycle(inst, e)) return Selection{e, SelectCase::B};
    }
    return std::nullopt;
}

std::optional<Selection> select_3c(const FchcInstance& inst) {
    for (uint32_t e = 0; e < inst.m(); ++e)
        if (inst.free(e) && !in_isolated_cycle(inst, e)) return Selection{e, SelectCase::C};
    return std::nullopt;
}

Selection edge_select(const FchcInstance& inst) {
    if (auto s = select_3a(inst)) return *s;
    // With F nonempty but every free edge next to F on an isolated cycle, 3b
    // has no candidate and the choice falls through to 3c.
    if (inst.forced_count() > 0)
        if (auto s = select_3b(inst)) return *s;
    if (auto s = select_3c(inst)) return *s;
    throw SelectionImpossible("edge_select: no free edge outside isolated 4-cycles");
}

std::optional<FchcInstance> drop_parallel_duplicates(const FchcInstance& inst, uint32_t* removed) {
    FchcInstance out = inst;
    uint32_t count = 0;
    if (inst.n() >= 3) {
        std::map<std::pair<uint32_t, uint32_t>, std::vector<uint32_t>> classes;
        for (uint32_t e = 0; e < inst.m(); ++e) {
            if (!inst.live(e)) continue;
            const Edge& ed = inst.graph().edge(e);
            classes[{std::min(ed.u, ed.v), std::max(ed.u, ed.v)}].push_back(e);
        }
        for (const auto& [key, es] : classes) {
            if (es.size() < 2) continue;
            const auto nforced = std::count_if(es.begin(), es.end(), [&](uint32_t e) { return inst.forced(e); });
            if (nforced >= 2) return std::nullopt;
            uint32_t keep = es[0];
            for (uint32_t e : es)
                if (inst.forced(e)) keep = e;
            for (uint32_t e : es)
                if (e != keep) {
                    out.remove(e);
                    ++count;
                }
        }
    }
    if (removed) *removed = count;
    return out;
}

void RunStats::absorb(RunStats&& child) {
    nodes_visited += child.nodes_visited;
    nodes_expanded += child.nodes_expanded;
    max_depth = std::max(max_depth, child.max_depth);
    for (size_t k = 0; k < case_counts.size(); ++k) case_counts[k] += child.case_counts[k];
    nodes.insert(nodes.end(), std::make_move_iterator(child.nodes.begin()), std::make_move_iterator(child.nodes.end()));
    accepting.insert(accepting.end(), std::make_move_iterator(child.accepting.begin()),
                     std::make_move_iterator(child.accepting.end()));
}

namespace {

class Search {
public:
    Search(const SolveOptions& opt, bool serial) : opt_(opt), serial_(serial) {}

    bool rec(const FchcInstance& node, uint32_t depth, uint64_t tau_sum, const std::vector<uint8_t>& nu, RunStats& st) {
        ++st.nodes_visited;
        st.max_depth = std::max(st.max_depth, depth);
        const TerminalResult t = terminal_check(node, opt_.use_short_cycle_rule);
        if (t.verdict) {
            if (*t.verdict) st.accepting.push_back({tau_sum, depth, nu});
            return *t.verdict;
        }
        const Selection sel = edge_select(node);
        FchcInstance c1 = node, c2 = node;
        c1.force(sel.edge);
        c2.remove(sel.edge);
        const uint32_t tau1 = triv_red(c1), tau2 = triv_red(c2);
        ++st.nodes_expanded;
        ++st.case_counts[static_cast<size_t>(sel.kind)];
        st.nodes.push_back({depth, sel.kind, sel.edge, size_metric(node), size_metric(c1), size_metric(c2), tau1, tau2,
                            node.forced_count() > 0, terminal_check(c1).verdict.has_value(),
                            terminal_check(c2).verdict.has_value()});

        auto child_nu = [&](uint8_t bit, uint32_t tau) {
            std::vector<uint8_t> out = nu;
            out.push_back(bit);
            out.insert(out.end(), tau, 0);
            return out;
        };
        const auto nu1 = child_nu(0, tau1), nu2 = child_nu(1, tau2);

        if (depth < opt_.task_depth) {
            if (serial_) {
                const bool r1 = rec(c1, depth + 1, tau_sum + tau1, nu1, st);
                const bool r2 = rec(c2, depth + 1, tau_sum + tau2, nu2, st);
                return r1 || r2;
            }
            RunStats s1, s2;
            bool r1 = false, r2 = false;
#pragma omp task shared(s1, r1, c1, nu1)
            r1 = rec(c1, depth + 1, tau_sum + tau1, nu1, s1);
#pragma omp task shared(s2, r2, c2, nu2)
            r2 = rec(c2, depth + 1, tau_sum + tau2, nu2, s2);
#pragma omp taskwait
            st.absorb(std::move(s1));
            st.absorb(std::move(s2));
            return r1 || r2;
        }
        const bool r1 = rec(c1, depth + 1, tau_sum + tau1, nu1, st);
        if (r1 && opt_.short_circuit) return true;
        const bool r2 = rec(c2, depth + 1, tau_sum + tau2, nu2, st);
        return r1 || r2;
    }

private:
    const SolveOptions& opt_;
    bool serial_;
};

Verdict run(const FchcInstance& inst, const SolveOptions& opt, bool serial) {
    Verdict v;
    uint32_t removed = 0;
    auto prepared = drop_parallel_duplicates(inst, &removed);
    v.stats.parallel_removed = removed;
    if (!prepared) return v;
    FchcInstance root = std::move(*prepared);
    v.stats.root_tau = triv_red(root);
    v.stats.s_root = size_metric(root);
    Search search(opt, serial);
    if (!serial && opt.task_depth > 0) {
#pragma omp parallel
#pragma omp single
        v.result = search.rec(root, 0, 0, {}, v.stats);
    } else {
        v.result = search.rec(root, 0, 0, {}, v.stats);
    }
    return v;
}

}  // namespace

Verdict solve(const FchcInstance& inst, const SolveOptions& opt) { return run(inst, opt, false); }

Verdict solve_serial(const FchcInstance& inst, const SolveOptions& opt) { return run(inst, opt, true); }

std::vector<Verdict> solve_all(const std::vector<FchcInstance>& insts, const SolveOptions& opt, bool parallel) {
    std::vector<Verdict> out(insts.size());
    const long count = static_cast<long>(insts.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long k = 0; k < count; ++k) out[size_t(k)] = solve(insts[size_t(k)], opt);
    } else {
        for (long k = 0; k < count; ++k) out[size_t(k)] = solve_serial(insts[size_t(k)], opt);
    }
    return out;
}

bool decrease_ok(int64_t d1, int64_t d2) {
    return (d1 >= 3 && d2 >= 3) || (d1 >= 2 && d2 >= 5) || (d1 >= 5 && d2 >= 2);
}

AuditReport audit_branch_decrease(const RunStats& stats) {
    AuditReport rep;
    for (size_t k = 0; k < stats.nodes.size(); ++k) {
        const NodeRecord& r = stats.nodes[k];
        const int64_t d1 = r.s_parent - r.s_force, d2 = r.s_parent - r.s_delete;
        if (!r.forced_nonempty) {
            ++rep.excluded_empty_f;
            rep.empty_f_min_force = std::min(rep.empty_f_min_force, d1);
            rep.empty_f_min_delete = std::min(rep.empty_f_min_delete, d2);
            continue;
        }
        if (r.force_terminal || r.delete_terminal) {
            ++rep.excluded_terminal_child;
            continue;
        }
        ++rep.audited;
        if (!decrease_ok(d1, d2))
            throw AuditFailure("node " + std::to_string(k) + " (depth " + std::to_string(r.depth) + ", edge " +
                               std::to_string(r.edge) + "): decreases " + std::to_string(d1) + "/" + std::to_string(d2));
    }
    const int64_t depth_cap = (stats.s_root + 1) / 2;
    for (size_t k = 0; k < stats.accepting.size(); ++k) {
        const AcceptingPath& p = stats.accepting[k];
        ++rep.accepting_paths;
        rep.max_accepting_depth = std::max(rep.max_accepting_depth, p.depth);
        rep.max_tau_sum = std::max(rep.max_tau_sum, p.tau_sum);
        if (int64_t(p.depth) > depth_cap)
            throw AuditFailure("accepting path " + std::to_string(k) + ": depth " + std::to_string(p.depth) +
                               " exceeds " + std::to_string(depth_cap));
        if (int64_t(p.tau_sum) > 4 * stats.s_root)
            throw AuditFailure("accepting path " + std::to_string(k) + ": tau sum " + std::to_string(p.tau_sum) +
                               " exceeds " + std::to_string(4 * stats.s_root));
    }
    return rep;
}

}  // namespace hfchc
