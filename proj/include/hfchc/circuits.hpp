#pragma once

// Reusable reversible building blocks emitted into a ProgramBuilder.
// Binary registers are little-endian: cell 0 is the least significant bit.

#include <vector>

#include "hfchc/revcore.hpp"

namespace hfchc::circ {

// Conditions expressing "r == value" on a binary register.
std::vector<Cond> eq_const(const Reg& r, uint64_t value);
std::vector<Cond> join(std::span<const Cond> a, std::span<const Cond> b);

// Applies `p` to `target` when every condition holds. More than two
// conditions are folded through a Toffoli chain on scratch bits.
void mc_perm(ProgramBuilder& b, std::span<const Cond> conds, CellRef target, Perm p);
void mcx(ProgramBuilder& b, std::span<const Cond> conds, CellRef target);
void mc_inc(ProgramBuilder& b, std::span<const Cond> conds, CellRef target, uint8_t k);

// Folds many conditions into at most two so repeated gates share one chain.
class AndFlag {
public:
    AndFlag(ProgramBuilder& b, std::span<const Cond> conds);
    AndFlag(const AndFlag&) = delete;
    AndFlag& operator=(const AndFlag&) = delete;
    ~AndFlag();
    std::span<const Cond> conds() const { return view_; }
    void release();

private:
    ProgramBuilder* b_;
    std::vector<Cond> orig_;
    std::vector<Cond> view_;
    Reg flag_{};
    bool folded_ = false;
    bool live_ = true;
};

// r ^= value (bitwise) when conds hold.
void xor_const(ProgramBuilder& b, const Reg& r, uint64_t value, std::span<const Cond> conds = {});
// dst ^= src over min(width) bits.
void xor_reg(ProgramBuilder& b, const Reg& src, const Reg& dst, std::span<const Cond> conds = {});

// t += a mod 2^t.width, and its inverse. a.width ≤ t.width.
void add(ProgramBuilder& b, const Reg& a, const Reg& t);
void sub(ProgramBuilder& b, const Reg& a, const Reg& t);
void add_const(ProgramBuilder& b, const Reg& t, uint64_t c, std::span<const Cond> conds = {});
void sub_const(ProgramBuilder& b, const Reg& t, uint64_t c, std::span<const Cond> conds = {});

// out ^= [x == y] when conds hold. x and y must have equal width.
void flip_if_equal(ProgramBuilder& b, const Reg& x, const Reg& y, CellRef out, std::span<const Cond> conds = {});

// dst += sign*src cellwise mod 3 (sign is 1 or 2).
void add_trits(ProgramBuilder& b, const Reg& src, const Reg& dst, uint8_t sign = 1);

// Cuccaro ripple-carry adder on two equal-width registers (params a, t).
ProgramPtr adder_prog(uint32_t width);

}  // namespace hfchc::circ
