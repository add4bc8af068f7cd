#pragma once

// Reversible generation of the efficient encoding of a ν-dependent sequence
// x_1, ..., x_r, where x_i may only be computed from ν and the encoding of
// the elements before it.
//
// Block programs R[i,l] map (ν, EffEnc(Z_i), 0) to (ν, EffEnc(Z_i), enc of
// {x_{i+1}, ..., x_{i+2^l}}). They recurse by recomputation, so every oracle
// invocation is real: nothing is cached across calls.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hfchc/encoding.hpp"

namespace hfchc {

// Calculate_i for i in [1, r]. Parameter layout of each program:
//   (nu: nu_width bits, one trit register per block of EffEnc(Z_{i-1}), x: bitlen(N) bits)
// It must be tagged calculate and leave its locals clean.
struct OracleFamily {
    uint32_t N = 0;
    uint32_t r = 0;
    uint32_t nu_width = 0;
    std::function<ProgramPtr(uint32_t i)> calculate;
    bool count_only = false;
};

struct GenBlock {
    uint32_t start;  // i of the R[i, a] that produces this block
    uint32_t level;  // a: the block holds 2^a elements
};

struct GenPlan {
    uint32_t r = 0;
    std::vector<GenBlock> blocks;

    static GenPlan make(uint32_t r);
    // Exact oracle invocations of one R[., l].
    static uint64_t level_calls(uint32_t l) { return 2ull << (2 * l); }
    uint64_t total_calls() const;
    // 2 (4^{floor(log2 r)+1} - 1) / 3.
    uint64_t call_bound() const;
};

// 2-adic valuation; g(0) is treated as unbounded.
uint32_t two_adic(uint64_t i);

// Ancilla constants for generate_prog: peak cells stay below
// alpha*(r log2(N/r) + r + log2 N) + A + beta with A the oracle peak.
struct SetgenConstants {
    double alpha;
    double beta;
};
const SetgenConstants& setgen_constants();

class SetGenerator {
public:
    explicit SetGenerator(OracleFamily family);

    const OracleFamily& family() const { return fam_; }
    const GenPlan& plan() const { return plan_; }

    // Params (nu, blocks of EffEnc(Z_i), out: capacity(N, 2^l) trits).
    ProgramPtr r_block(uint32_t i, uint32_t l);
    // Params (nu, eff: eff_width(N, r) trits). Blocks are laid out largest first.
    ProgramPtr generate();
    // Params (nu, out: capacity(N, r) trits).
    ProgramPtr eff_to_basic();
    // Recompute-to-uncompute baseline with the same layout as generate().
    // It spends 2^{r+1} - 2 oracle calls.
    ProgramPtr naive();
    // Peak cells over the oracle family.
    uint64_t oracle_peak();

private:
    ProgramPtr calc(uint32_t i);
    ProgramPtr naive_step(uint32_t i);

    OracleFamily fam_;
    GenPlan plan_;
    std::vector<ProgramPtr> calc_;
    std::map<std::pair<uint32_t, uint32_t>, ProgramPtr> blocks_;
    std::map<uint32_t, ProgramPtr> naive_;
    ProgramPtr gen_, basic_;
};

// Parses "R[i,l]" program names; returns false for anything else.
bool parse_block_name(const std::string& name, uint32_t& i, uint32_t& l);

// Records every executed R[i,l] (forward or inverse) with the oracle calls it
// made. Install on a Machine before running.
struct LevelEvent {
    uint32_t i;
    uint32_t l;
    bool inverse;
    uint64_t calls;
};
class LevelAudit {
public:
    void attach(Machine& m);
    const std::vector<LevelEvent>& events() const { return done_; }

private:
    std::vector<std::pair<LevelEvent, uint64_t>> open_;
    std::vector<LevelEvent> done_;
};

// A Z-independent oracle: x_i = table[nu] (table entries in [1, N]).
ProgramPtr scripted_oracle(uint32_t N, uint32_t nu_width, uint32_t i, const std::vector<uint32_t>& table);

// Family whose x_i come from a per-ν script: script[u][i-1] = x_i for ν = u.
OracleFamily scripted_family(uint32_t N, uint32_t r, uint32_t nu_width, std::vector<std::vector<uint32_t>> script);

}  // namespace hfchc
