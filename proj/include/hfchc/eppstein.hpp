#pragma once

// Branch-and-reduce decision procedure for forced cubic Hamiltonian cycles,
// with per-node instrumentation of the size metric.
//
// Trivial reductions are applied one edge at a time: rule a (degree-2 vertex
// with a free edge), rule b (degree-3 vertex with exactly two forced edges),
// rule c (free 4-cycle with forced opposite corners and a free spoke),
// rescanning from rule a after every change. The same single-step function
// drives the non-recursive pipeline in qsim, so both visit identical states.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hfchc/graph.hpp"

namespace hfchc {

struct ReductionStep {
    uint32_t edge;
    bool remove;  // false: force
    char rule;    // 'a', 'b' or 'c'
};

std::optional<ReductionStep> next_reduction(const FchcInstance& inst);
// Applies reductions to fixpoint in place; returns τ, the number of edges
// newly forced or deleted.
uint32_t triv_red(FchcInstance& inst);
bool reduction_free(const FchcInstance& inst);

// The free graph G\F is a disjoint union of 4-cycles and isolated vertices.
bool free_collection(const FchcInstance& inst);
// e is free and lies on a free 4-cycle that is a whole component of G\F.
bool in_isolated_cycle(const FchcInstance& inst, uint32_t e);
// F contains a cycle through fewer than n vertices.
bool has_nonhamiltonian_forced_cycle(const FchcInstance& inst);

enum class TerminalKind : uint8_t { None, LowDegree, ThreeForced, Collection, ShortCycle };
struct TerminalResult {
    std::optional<bool> verdict;
    TerminalKind kind = TerminalKind::None;
};
TerminalResult terminal_check(const FchcInstance& inst, bool use_short_cycle_rule = true);

enum class SelectCase : uint8_t { A, B, C };
struct Selection {
    uint32_t edge;
    SelectCase kind;
};
// Throws SelectionImpossible when no free edge qualifies.
Selection edge_select(const FchcInstance& inst);
std::optional<Selection> select_3a(const FchcInstance& inst);
std::optional<Selection> select_3b(const FchcInstance& inst);
std::optional<Selection> select_3c(const FchcInstance& inst);

// For n >= 3 a Hamiltonian cycle never uses two parallel edges, so all but
// one edge of each parallel class is deleted (a forced one is kept). Returns
// nullopt when two parallel edges are both forced.
std::optional<FchcInstance> drop_parallel_duplicates(const FchcInstance& inst, uint32_t* removed = nullptr);

struct NodeRecord {
    uint32_t depth;
    SelectCase kind;
    uint32_t edge;
    int64_t s_parent;
    int64_t s_force;
    int64_t s_delete;
    uint32_t tau_force;
    uint32_t tau_delete;
    bool forced_nonempty;
    bool force_terminal;
    bool delete_terminal;
};

struct AcceptingPath {
    uint64_t tau_sum;  // reductions below the root
    uint32_t depth;    // branch decisions
    // One bit per step of the non-recursive pipeline: for each branch, the
    // decision (0 force, 1 delete) followed by a zero per reduction it triggered.
    std::vector<uint8_t> nu;
};

struct RunStats {
    uint64_t nodes_visited = 0;
    uint64_t nodes_expanded = 0;
    uint32_t max_depth = 0;
    int64_t s_root = 0;
    uint32_t root_tau = 0;
    uint32_t parallel_removed = 0;
    std::array<uint64_t, 3> case_counts{};
    std::vector<NodeRecord> nodes;  // pre-order, force subtree before delete subtree
    std::vector<AcceptingPath> accepting;

    // Appends a child subtree's counters and records.
    void absorb(RunStats&& child);
};

struct Verdict {
    bool result = false;
    RunStats stats;
};

struct SolveOptions {
    bool use_short_cycle_rule = true;
    // Stop at the first accepting leaf. Audits usually want the full tree.
    bool short_circuit = true;
    // Nodes shallower than this branch as OpenMP tasks and always explore
    // both children, so results do not depend on the thread count.
    uint32_t task_depth = 0;
};

Verdict solve(const FchcInstance& inst, const SolveOptions& opt = {});
// The same search run on one thread; identical results and stats.
Verdict solve_serial(const FchcInstance& inst, const SolveOptions& opt = {});

// Solves many instances; `parallel` spreads them over OpenMP threads.
// Output order follows input order either way.
std::vector<Verdict> solve_all(const std::vector<FchcInstance>& insts, const SolveOptions& opt, bool parallel);

struct AuditReport {
    uint64_t audited = 0;
    uint64_t excluded_empty_f = 0;
    uint64_t excluded_terminal_child = 0;
    uint64_t accepting_paths = 0;
    uint32_t max_accepting_depth = 0;
    uint64_t max_tau_sum = 0;
    // Smallest decreases seen at F-empty nodes (reported, not asserted).
    int64_t empty_f_min_force = INT64_MAX;
    int64_t empty_f_min_delete = INT64_MAX;
};

bool decrease_ok(int64_t d1, int64_t d2);
// Throws AuditFailure naming the first offending node or path.
AuditReport audit_branch_decrease(const RunStats& stats);

}  // namespace hfchc
