#pragma once

// Reversible register machine over mixed-radix cells.
//
// Programs address cells through slots: slot k < params().size() is the k-th
// parameter bound by the caller, the remaining slots are locals that the
// machine allocates zeroed on entry and checks for zero on exit.

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hfchc/errors.hpp"

namespace hfchc {

enum class RegKind : uint8_t { Input, Output, Ancilla };

struct RegisterRef {
    uint32_t id = 0;
    uint32_t width = 0;
    uint8_t radix = 2;
    RegKind kind = RegKind::Ancilla;
};

struct CellRef {
    uint16_t slot = 0;
    uint32_t idx = 0;
    friend bool operator==(const CellRef&, const CellRef&) = default;
};

// Control condition: the gate fires only if `cell` holds `value`.
struct Cond {
    CellRef cell;
    uint8_t value = 1;
    friend bool operator==(const Cond&, const Cond&) = default;
};

struct Reg {
    uint16_t slot = 0;
    uint32_t offset = 0;
    uint32_t width = 0;
    uint8_t radix = 2;

    CellRef operator[](uint32_t i) const { return {slot, offset + i}; }
    Reg sub(uint32_t off, uint32_t w) const;
};

using Perm = std::array<uint8_t, 3>;

struct Gate {
    enum class Op : uint8_t { Permute, Swap };
    Op op = Op::Permute;
    uint8_t ncond = 0;
    Perm perm{0, 1, 2};
    Perm iperm{0, 1, 2};
    CellRef a;
    CellRef b;
    std::array<Cond, 2> cond{};

    Gate inverse() const;
    friend bool operator==(const Gate& x, const Gate& y);
};

struct Shape {
    uint32_t width = 0;
    uint8_t radix = 2;
    friend bool operator==(const Shape&, const Shape&) = default;
};

struct Binding {
    uint16_t slot = 0;
    uint32_t offset = 0;
    uint32_t width = 0;
    friend bool operator==(const Binding&, const Binding&) = default;
};

// Static cost of one invocation. Unrolled circuits have data-independent
// gate counts and allocation patterns, so these equal the dynamic counters.
struct ProgramStats {
    uint64_t gates = 0;
    uint64_t calculate_calls = 0;
    uint64_t peak_cells = 0;
    uint64_t peak_bits = 0;  // a trit counts as two bits
};

class Program;
using ProgramPtr = std::shared_ptr<const Program>;

struct Call {
    ProgramPtr callee;
    bool inverse = false;
    std::vector<Binding> bind;
};

// Semantic replacement for a program body. Receives the parameter cells and
// the direction; must agree with the expanded circuit on valid inputs.
using Shortcut = std::function<void(std::span<const std::span<uint8_t>> params, bool inverse)>;

class Program {
public:
    const std::string& name() const { return name_; }
    const std::vector<Shape>& params() const { return params_; }
    const std::vector<Shape>& locals() const { return locals_; }
    const ProgramStats& stats() const { return stats_; }
    bool opaque() const { return opaque_; }
    bool has_shortcut() const { return static_cast<bool>(shortcut_); }
    bool is_calculate() const { return calculate_; }
    bool is_inverse_view() const { return inverted_; }

    size_t size() const { return seq_.size(); }
    bool is_call(size_t step) const { return seq_[step] & kCallBit; }
    const Gate& gate(size_t step) const { return gates_[seq_[step] & ~kCallBit]; }
    const Call& call(size_t step) const { return calls_[seq_[step] & ~kCallBit]; }

    // Materialized inverse: steps reversed, gates inverted, call directions flipped.
    ProgramPtr inverse() const;

    friend bool operator==(const Program& x, const Program& y);

private:
    friend class ProgramBuilder;
    friend class Machine;
    static constexpr uint32_t kCallBit = 0x80000000u;

    std::string name_;
    std::vector<Shape> params_;
    std::vector<Shape> locals_;
    std::vector<Gate> gates_;
    std::vector<Call> calls_;
    std::vector<uint32_t> seq_;
    ProgramStats stats_;
    bool opaque_ = false;
    bool calculate_ = false;
    bool inverted_ = false;
    Shortcut shortcut_;
};

ProgramPtr inverse(const ProgramPtr& p);

class ProgramBuilder {
public:
    // count_only: gates and calls are tallied into the stats but not stored.
    // The result is opaque and needs a shortcut to run.
    explicit ProgramBuilder(std::string name, bool count_only = false);

    Reg param(uint32_t width, uint8_t radix = 2);
    Reg local(uint32_t width, uint8_t radix = 2);

    // Zeroed temporary; must be returned to zero before release so a later
    // scratch request can reuse it.
    Reg scratch(uint32_t width, uint8_t radix = 2);
    void release(const Reg& r);

    void perm(CellRef target, Perm p, std::span<const Cond> conds = {});
    void x(CellRef target, std::span<const Cond> conds = {});
    void x(CellRef target, std::initializer_list<Cond> conds) { x(target, std::span(conds.begin(), conds.size())); }
    void inc(CellRef target, uint8_t k, std::span<const Cond> conds = {});
    void inc(CellRef target, uint8_t k, std::initializer_list<Cond> conds) {
        inc(target, k, std::span(conds.begin(), conds.size()));
    }
    void swap(CellRef a, CellRef b);
    void call(const ProgramPtr& p, std::span<const Reg> args, bool inverse = false);
    void call(const ProgramPtr& p, std::initializer_list<Reg> args, bool inverse = false) {
        call(p, std::span(args.begin(), args.size()), inverse);
    }

    void set_calculate(bool on) { prog_->calculate_ = on; }
    void set_shortcut(Shortcut s) { prog_->shortcut_ = std::move(s); }
    // Adds a fixed cost on top of what the body accumulates (for oracle steps
    // whose circuit is modeled rather than built).
    void add_declared_cost(const ProgramStats& extra);

    bool count_only() const { return count_only_; }
    uint8_t radix_of(CellRef c) const { return slot_radix_[c.slot]; }
    uint64_t gate_count() const { return gates_; }

    ProgramPtr build();

private:
    void push_gate(const Gate& g);
    void check_cell(CellRef c) const;

    std::shared_ptr<Program> prog_;
    bool count_only_;
    bool built_ = false;
    std::vector<uint8_t> slot_radix_;
    std::vector<uint32_t> slot_width_;
    std::map<std::pair<uint32_t, uint8_t>, std::vector<uint16_t>> pool_;
    uint64_t gates_ = 0;
    uint64_t calc_ = 0;
    uint64_t child_peak_cells_ = 0;
    uint64_t child_peak_bits_ = 0;
    ProgramStats declared_{};
};

class Machine {
public:
    struct Options {
        bool use_shortcuts = true;
        // Programs cheaper than this are expanded even when shortcuts are on.
        uint64_t shortcut_min_gates = 0;
    };
    // Invoked on entry and exit of every program execution (expanded or not).
    using Observer = std::function<void(const Program&, bool inverse, bool entering, const Machine&)>;

    Machine() : Machine(Options{}) {}
    explicit Machine(Options opt) : opt_(opt) {}

    RegisterRef alloc(uint32_t width, uint8_t radix, RegKind kind);
    RegisterRef alloc_ancilla(uint32_t width, uint8_t radix) { return alloc(width, radix, RegKind::Ancilla); }
    void free(const RegisterRef& r);
    void free_ancilla(const RegisterRef& r) { free(r); }

    std::vector<uint8_t> read(const RegisterRef& r) const;
    void write(const RegisterRef& r, std::span<const uint8_t> values);
    // Little-endian binary view: cell 0 is the least significant bit.
    uint64_t read_uint(const RegisterRef& r) const;
    void write_uint(const RegisterRef& r, uint64_t v);

    void run(const Program& p, std::span<const RegisterRef> args, bool inverse = false);
    void run(const Program& p, std::initializer_list<RegisterRef> args, bool inverse = false) {
        run(p, std::span(args.begin(), args.size()), inverse);
    }

    // Contents of all live registers in allocation order.
    std::vector<uint8_t> snapshot() const;

    uint64_t gate_count() const { return gate_count_; }
    uint64_t calculate_calls() const { return calculate_calls_; }
    uint64_t peak_live_width() const { return peak_cells_; }
    uint64_t peak_live_bits() const { return peak_bits_; }
    uint64_t live_width() const { return live_cells_; }
    uint64_t io_width() const { return io_cells_; }
    void reset_counters();
    void set_observer(Observer o) { observer_ = std::move(o); }
    const Options& options() const { return opt_; }

private:
    struct RegInfo {
        uint32_t offset;
        uint32_t width;
        uint8_t radix;
        RegKind kind;
        bool live;
    };

    const RegInfo& live_reg(const RegisterRef& r) const;
    void exec(const Program& p, bool inv, std::vector<uint32_t>& base);
    void bump_live(int64_t cells, int64_t bits);

    Options opt_;
    std::vector<uint8_t> cells_;
    std::vector<RegInfo> regs_;
    uint32_t top_ = 0;
    uint64_t gate_count_ = 0;
    uint64_t calculate_calls_ = 0;
    uint64_t live_cells_ = 0;
    uint64_t live_bits_ = 0;
    uint64_t peak_cells_ = 0;
    uint64_t peak_bits_ = 0;
    uint64_t io_cells_ = 0;
    Observer observer_;
};

inline uint32_t cell_bits(uint8_t radix) { return radix == 2 ? 1 : 2; }

}  // namespace hfchc
