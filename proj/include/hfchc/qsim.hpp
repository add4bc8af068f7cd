#pragma once

// Non-recursive form of the branch-and-reduce solver. A search string ν of r
// bits drives r steps; step i appends one element x_i to the set X:
//   e+1        edge e forced
//   e+1+m      edge e deleted
//   i+2m       dummy (the step did nothing; ν_i is ignored)
// Reduce builds EffEnc(X) reversibly through the set generator, and Check
// decides whether the final state certifies a Hamiltonian cycle. Quantum
// speedup enters only as a query-count model over the ν search.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hfchc/graph.hpp"
#include "hfchc/revcore.hpp"
#include "hfchc/setgen.hpp"

namespace hfchc::qsim {

class Instance {
public:
    // The base must be reduction-free with no parallel edges; throws
    // InstanceNotReduced otherwise.
    explicit Instance(FchcInstance base);

    const FchcInstance& base() const { return base_; }
    uint32_t n() const { return base_.n(); }
    uint32_t m() const { return base_.m(); }
    int64_t s() const { return s_; }
    uint32_t r() const { return r_; }
    // Element domain [1, N]. Dummies reach 2m + r, which exceeds 3m once r > m.
    uint32_t N() const { return N_; }

    uint32_t force_elem(uint32_t e) const { return e + 1; }
    uint32_t delete_elem(uint32_t e) const { return e + 1 + m(); }
    uint32_t dummy_elem(uint32_t i) const { return i + 2 * m(); }

private:
    FchcInstance base_;
    int64_t s_;
    uint32_t r_;
    uint32_t N_;
};

uint32_t nu_length(int64_t s);

// ---------------------------------------------------------------- classical

// Cases in cascade order: 1 degree-2 rule, 2 degree-3 rule, 3 four-cycle
// rule, 4 terminal (dummy), 5..7 branching selections.
struct Step {
    uint32_t element;
    uint8_t kase;
    bool uses_nu;
};

// Base state with every element of X applied; dummies are skipped.
FchcInstance apply_elements(const Instance& q, std::span<const uint32_t> X);
Step calculate(const Instance& q, const FchcInstance& state, uint32_t i, bool nu_i);

struct Trace {
    std::vector<uint32_t> X;
    std::vector<uint8_t> cases;
    std::vector<uint8_t> consumed;  // 1 where ν_i decided a branch
    FchcInstance final_state;

    uint32_t ignored() const;
};
Trace reduce(const Instance& q, std::span<const uint8_t> nu);

// The acceptance predicate h on a final state.
bool check(const Instance& q, const FchcInstance& state);
// Adjacency in G' = G minus deleted edges, as the check oracle sees it.
bool adjacent(const Instance& q, const FchcInstance& state, uint32_t v, uint32_t w);

// ---------------------------------------------------------------- circuits

struct CircuitOptions {
    // Attach a classical shortcut to every Calculate_i and to Check. The
    // expanded bodies are always built; shortcuts only change execution.
    bool shortcuts = true;
    bool count_only = false;
};

// Params (nu: r bits, one trit register per block of EffEnc(Z_{i-1}), x: bitlen(N) bits).
ProgramPtr calculate_prog(const Instance& q, uint32_t i, const CircuitOptions& opt = {});
OracleFamily oracle_family(const Instance& q, const CircuitOptions& opt = {});
// Params (nu: r bits, eff: eff_width(N, r) trits).
ProgramPtr reduce_prog(const Instance& q, const CircuitOptions& opt = {});
// Params (eff: eff_width(N, r) trits, out: 1 bit).
ProgramPtr check_prog(const Instance& q, const CircuitOptions& opt = {});
// Params (blocks of EffEnc(Z_r), v: bitlen(n-1) bits, w: same, out: 1 bit).
ProgramPtr adjacency_prog(const Instance& q, bool count_only = false);

// Registers of one Calculate_i after its CCS cascade, before the inverse
// cascade clears them. Exposed so tests can watch the flag counter.
struct CascadeProbe {
    uint32_t fc;
    bool fb;
    uint32_t element;
};
// Params (nu, blocks, fc: 3 bits, fb, e: bitlen(N) bits, a: 1 bit).
ProgramPtr cascade_prog(const Instance& q, uint32_t i, bool count_only = false);

// Persistent registers (ν, the set encoding, the output bit) plus the peak
// ancilla over Reduce and Check, from count-only builds.
struct SpaceReport {
    uint64_t nu_cells = 0;
    uint64_t eff_cells = 0;  // trits
    uint64_t out_cells = 0;
    uint64_t ancilla_cells = 0;
    uint64_t ancilla_bits = 0;
    uint64_t total_cells = 0;
    uint64_t total_bits = 0;  // a trit counts as two bits
    uint64_t ordered_list_bits = 0;  // r·⌈log2 N⌉: the set kept as a plain list
    uint64_t eff_bound_trits = 0;    // ⌊2r·log2(N/r+1)⌋ + 8r
    uint64_t reduce_calculate_calls = 0;
};
SpaceReport qubit_accounting(const Instance& q);

// A ring 0..n-1 with chords: window vertices 0..w-1 pair up as j, j+w/2 and
// the rest are matched at random. Ring edges leaving the window are forced.
// Reduction deletes the outside chords, so s depends only on w and the
// result is a reduced instance whose size stays fixed while n grows.
FchcInstance fixed_size_family(uint32_t n, uint32_t window, uint64_t seed);

// ---------------------------------------------------------------- search

enum class Mode { Exhaustive, BranchPruned, Sampled };

struct SearchOptions {
    Mode mode = Mode::BranchPruned;
    uint32_t exhaustive_limit = 20;
    uint64_t trials = 1000;
    uint64_t seed = 1;
    bool parallel = true;
};

struct SearchReport {
    bool found = false;
    std::vector<uint8_t> witness;
    uint32_t r = 0;
    uint32_t t_measured = 0;
    uint32_t branch_bits = 0;
    uint64_t evaluated = 0;  // ν strings run through Reduce and Check
    uint64_t hits = 0;       // sampled mode: accepting trials
    uint64_t grover_estimate = 0;
    uint64_t peak_cells = 0;
};

SearchReport enumerate_search(const Instance& q, const SearchOptions& opt = {});

// ⌈(π/4)·2^{(r-t)/2}⌉ amplitude-amplification iterations over the witness's
// branch bits. Without a witness the worst case over all r bits is returned.
struct GroverEstimate {
    uint64_t iterations = 0;
    bool no_witness = false;
    bool within_bound = false;  // branch bits ≤ ⌈s/2⌉
};
GroverEstimate grover_cost_model(const SearchReport& report, const Instance& q);

// Convenience for arbitrary inputs: drops parallel duplicates, reduces, and
// searches the result. Terminal or contradictory bases are decided directly.
struct PipelineResult {
    bool verdict;
    std::optional<SearchReport> report;  // absent when preprocessing decided
    int64_t s = 0;
};
PipelineResult solve_pipeline(const FchcInstance& inst, const SearchOptions& opt = {});

}  // namespace hfchc::qsim
