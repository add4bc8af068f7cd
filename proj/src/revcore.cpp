#include "hfchc/revcore.hpp"

#include <algorithm>
#include <stdexcept>

namespace hfchc {

Reg Reg::sub(uint32_t off, uint32_t w) const {
    if (off + w > width) throw std::out_of_range("Reg::sub out of range");
    return Reg{slot, offset + off, w, radix};
}

Gate Gate::inverse() const {
    Gate g = *this;
    std::swap(g.perm, g.iperm);
    return g;
}

bool operator==(const Gate& x, const Gate& y) {
    if (x.op != y.op || x.ncond != y.ncond || !(x.a == y.a)) return false;
    if (x.op == Gate::Op::Swap) {
        if (!(x.b == y.b)) return false;
    } else if (x.perm != y.perm) {
        return false;
    }
    for (int k = 0; k < x.ncond; ++k)
        if (!(x.cond[k] == y.cond[k])) return false;
    return true;
}

ProgramPtr Program::inverse() const {
    auto q = std::make_shared<Program>();
    q->params_ = params_;
    q->locals_ = locals_;
    q->stats_ = stats_;
    q->opaque_ = opaque_;
    q->calculate_ = calculate_;
    q->inverted_ = !inverted_;
    static const std::string suffix = "^-1";
    if (inverted_ && name_.size() >= suffix.size() && name_.ends_with(suffix))
        q->name_ = name_.substr(0, name_.size() - suffix.size());
    else
        q->name_ = name_ + suffix;
    q->gates_.reserve(gates_.size());
    for (const Gate& g : gates_) q->gates_.push_back(g.inverse());
    q->calls_ = calls_;
    for (Call& c : q->calls_) c.inverse = !c.inverse;
    q->seq_.assign(seq_.rbegin(), seq_.rend());
    if (shortcut_) {
        Shortcut inner = shortcut_;
        q->shortcut_ = [inner](std::span<const std::span<uint8_t>> ps, bool inv) { inner(ps, !inv); };
    }
    return q;
}

bool operator==(const Program& x, const Program& y) {
    if (x.params_ != y.params_ || x.locals_ != y.locals_ || x.seq_ != y.seq_) return false;
    if (x.opaque_ != y.opaque_ || x.calculate_ != y.calculate_) return false;
    for (size_t s = 0; s < x.seq_.size(); ++s) {
        if (x.is_call(s)) {
            const Call& a = x.call(s);
            const Call& b = y.call(s);
            if (a.inverse != b.inverse || a.bind != b.bind) return false;
            if (a.callee != b.callee && !(*a.callee == *b.callee)) return false;
        } else if (!(x.gate(s) == y.gate(s))) {
            return false;
        }
    }
    return true;
}

ProgramPtr inverse(const ProgramPtr& p) { return p->inverse(); }

// ---------------------------------------------------------------- builder

ProgramBuilder::ProgramBuilder(std::string name, bool count_only)
    : prog_(std::make_shared<Program>()), count_only_(count_only) {
    prog_->name_ = std::move(name);
}

Reg ProgramBuilder::param(uint32_t width, uint8_t radix) {
    if (!prog_->locals_.empty()) throw std::logic_error("params must precede locals");
    if (width == 0 || (radix != 2 && radix != 3)) throw std::invalid_argument("bad register shape");
    auto slot = static_cast<uint16_t>(slot_radix_.size());
    prog_->params_.push_back({width, radix});
    slot_radix_.push_back(radix);
    slot_width_.push_back(width);
    return Reg{slot, 0, width, radix};
}

Reg ProgramBuilder::local(uint32_t width, uint8_t radix) {
    if (width == 0 || (radix != 2 && radix != 3)) throw std::invalid_argument("bad register shape");
    auto slot = static_cast<uint16_t>(slot_radix_.size());
    prog_->locals_.push_back({width, radix});
    slot_radix_.push_back(radix);
    slot_width_.push_back(width);
    return Reg{slot, 0, width, radix};
}

Reg ProgramBuilder::scratch(uint32_t width, uint8_t radix) {
    auto& free_list = pool_[{width, radix}];
    if (!free_list.empty()) {
        uint16_t slot = free_list.back();
        free_list.pop_back();
        return Reg{slot, 0, width, radix};
    }
    return local(width, radix);
}

void ProgramBuilder::release(const Reg& r) {
    if (r.offset != 0 || r.width != slot_width_.at(r.slot) || r.slot < prog_->params_.size())
        throw std::logic_error("release expects a whole scratch register");
    pool_[{r.width, r.radix}].push_back(r.slot);
}

void ProgramBuilder::check_cell(CellRef c) const {
    if (c.slot >= slot_radix_.size() || c.idx >= slot_width_[c.slot])
        throw std::out_of_range(prog_->name_ + ": cell reference out of range");
}

void ProgramBuilder::push_gate(const Gate& g) {
    ++gates_;
    if (count_only_) return;
    prog_->seq_.push_back(static_cast<uint32_t>(prog_->gates_.size()));
    prog_->gates_.push_back(g);
}

void ProgramBuilder::perm(CellRef target, Perm p, std::span<const Cond> conds) {
    if (conds.size() > 2) throw std::logic_error("at most two controls per primitive gate");
    Gate g;
    g.op = Gate::Op::Permute;
    g.a = target;
    g.perm = p;
    g.ncond = static_cast<uint8_t>(conds.size());
    for (size_t k = 0; k < conds.size(); ++k) g.cond[k] = conds[k];
    if (!count_only_) {
        check_cell(target);
        uint8_t r = radix_of(target);
        bool seen[3] = {false, false, false};
        for (uint8_t v = 0; v < 3; ++v) {
            if (v < r) {
                if (p[v] >= r || seen[p[v]]) throw RadixMismatch(prog_->name_ + ": permutation does not fit cell radix");
                seen[p[v]] = true;
            } else if (p[v] != v) {
                throw RadixMismatch(prog_->name_ + ": permutation does not fit cell radix");
            }
        }
        for (const Cond& c : conds) {
            check_cell(c.cell);
            if (c.cell == target) throw std::logic_error("control equals target");
            if (c.value >= radix_of(c.cell)) throw RadixMismatch(prog_->name_ + ": control value exceeds radix");
        }
    }
    for (uint8_t v = 0; v < 3; ++v) g.iperm[p[v]] = v;
    push_gate(g);
}

void ProgramBuilder::x(CellRef target, std::span<const Cond> conds) { perm(target, Perm{1, 0, 2}, conds); }

void ProgramBuilder::inc(CellRef target, uint8_t k, std::span<const Cond> conds) {
    uint8_t r = radix_of(target);
    k %= r;
    if (k == 0) return;
    Perm p{0, 1, 2};
    for (uint8_t v = 0; v < r; ++v) p[v] = static_cast<uint8_t>((v + k) % r);
    perm(target, p, conds);
}

void ProgramBuilder::swap(CellRef a, CellRef b) {
    if (!count_only_) {
        check_cell(a);
        check_cell(b);
        if (radix_of(a) != radix_of(b)) throw RadixMismatch(prog_->name_ + ": swap across radices");
        if (a == b) throw std::logic_error("swap of a cell with itself");
    }
    Gate g;
    g.op = Gate::Op::Swap;
    g.a = a;
    g.b = b;
    push_gate(g);
}

void ProgramBuilder::call(const ProgramPtr& p, std::span<const Reg> args, bool inverse) {
    if (args.size() != p->params().size())
        throw std::invalid_argument(prog_->name_ + ": wrong argument count calling " + p->name());
    for (size_t k = 0; k < args.size(); ++k) {
        if (args[k].width != p->params()[k].width)
            throw std::invalid_argument(prog_->name_ + ": width mismatch calling " + p->name());
        if (args[k].radix != p->params()[k].radix)
            throw RadixMismatch(prog_->name_ + ": radix mismatch calling " + p->name());
    }
    const ProgramStats& st = p->stats();
    gates_ += st.gates;
    calc_ += st.calculate_calls;
    child_peak_cells_ = std::max(child_peak_cells_, st.peak_cells);
    child_peak_bits_ = std::max(child_peak_bits_, st.peak_bits);
    if (count_only_) return;
    Call c;
    c.callee = p;
    c.inverse = inverse;
    c.bind.reserve(args.size());
    for (const Reg& a : args) c.bind.push_back({a.slot, a.offset, a.width});
    prog_->seq_.push_back(static_cast<uint32_t>(prog_->calls_.size()) | Program::kCallBit);
    prog_->calls_.push_back(std::move(c));
}

void ProgramBuilder::add_declared_cost(const ProgramStats& extra) {
    declared_.gates += extra.gates;
    declared_.calculate_calls += extra.calculate_calls;
    declared_.peak_cells = std::max(declared_.peak_cells, extra.peak_cells);
    declared_.peak_bits = std::max(declared_.peak_bits, extra.peak_bits);
}

ProgramPtr ProgramBuilder::build() {
    if (built_) throw std::logic_error("ProgramBuilder::build called twice");
    built_ = true;
    uint64_t cells = 0, bits = 0;
    for (const Shape& s : prog_->locals_) {
        cells += s.width;
        bits += uint64_t(s.width) * cell_bits(s.radix);
    }
    ProgramStats& st = prog_->stats_;
    st.gates = gates_ + declared_.gates;
    st.calculate_calls = calc_ + declared_.calculate_calls + (prog_->calculate_ ? 1 : 0);
    st.peak_cells = cells + std::max(child_peak_cells_, declared_.peak_cells);
    st.peak_bits = bits + std::max(child_peak_bits_, declared_.peak_bits);
    prog_->opaque_ = count_only_;
    return prog_;
}

// ---------------------------------------------------------------- machine

RegisterRef Machine::alloc(uint32_t width, uint8_t radix, RegKind kind) {
    if (width == 0 || (radix != 2 && radix != 3)) throw std::invalid_argument("bad register shape");
    RegInfo info{top_, width, radix, kind, true};
    top_ += width;
    if (cells_.size() < top_) cells_.resize(top_, 0);
    std::fill(cells_.begin() + info.offset, cells_.begin() + top_, 0);
    regs_.push_back(info);
    if (kind == RegKind::Ancilla)
        bump_live(width, int64_t(width) * cell_bits(radix));
    else
        io_cells_ += width;
    return RegisterRef{static_cast<uint32_t>(regs_.size() - 1), width, radix, kind};
}

const Machine::RegInfo& Machine::live_reg(const RegisterRef& r) const {
    if (r.id >= regs_.size() || !regs_[r.id].live) throw DeadRegister("register " + std::to_string(r.id) + " is not live");
    return regs_[r.id];
}

void Machine::free(const RegisterRef& r) {
    const RegInfo& info = live_reg(r);
    if (info.kind == RegKind::Ancilla) {
        for (uint32_t k = 0; k < info.width; ++k)
            if (cells_[info.offset + k] != 0)
                throw AncillaNotClean("ancilla register " + std::to_string(r.id) + " freed with nonzero cells");
        bump_live(-int64_t(info.width), -int64_t(info.width) * cell_bits(info.radix));
    } else {
        io_cells_ -= info.width;
        std::fill_n(cells_.begin() + info.offset, info.width, 0);
    }
    regs_[r.id].live = false;
    while (!regs_.empty() && !regs_.back().live) {
        top_ = regs_.back().offset;
        regs_.pop_back();
    }
}

std::vector<uint8_t> Machine::read(const RegisterRef& r) const {
    const RegInfo& info = live_reg(r);
    return {cells_.begin() + info.offset, cells_.begin() + info.offset + info.width};
}

void Machine::write(const RegisterRef& r, std::span<const uint8_t> values) {
    const RegInfo& info = live_reg(r);
    if (values.size() != info.width) throw std::invalid_argument("write: width mismatch");
    for (uint32_t k = 0; k < info.width; ++k) {
        if (values[k] >= info.radix) throw RadixMismatch("write: value exceeds radix");
        cells_[info.offset + k] = values[k];
    }
}

uint64_t Machine::read_uint(const RegisterRef& r) const {
    const RegInfo& info = live_reg(r);
    if (info.radix != 2) throw RadixMismatch("read_uint on a trit register");
    uint64_t v = 0;
    for (uint32_t k = 0; k < info.width && k < 64; ++k) v |= uint64_t(cells_[info.offset + k]) << k;
    return v;
}

void Machine::write_uint(const RegisterRef& r, uint64_t v) {
    const RegInfo& info = live_reg(r);
    if (info.radix != 2) throw RadixMismatch("write_uint on a trit register");
    for (uint32_t k = 0; k < info.width; ++k) cells_[info.offset + k] = k < 64 ? (v >> k) & 1 : 0;
}

std::vector<uint8_t> Machine::snapshot() const {
    std::vector<uint8_t> out;
    for (const RegInfo& info : regs_)
        if (info.live) out.insert(out.end(), cells_.begin() + info.offset, cells_.begin() + info.offset + info.width);
    return out;
}

void Machine::reset_counters() {
    gate_count_ = 0;
    calculate_calls_ = 0;
    peak_cells_ = live_cells_;
    peak_bits_ = live_bits_;
}

void Machine::bump_live(int64_t cells, int64_t bits) {
    live_cells_ = uint64_t(int64_t(live_cells_) + cells);
    live_bits_ = uint64_t(int64_t(live_bits_) + bits);
    peak_cells_ = std::max(peak_cells_, live_cells_);
    peak_bits_ = std::max(peak_bits_, live_bits_);
}

void Machine::run(const Program& p, std::span<const RegisterRef> args, bool inverse) {
    if (args.size() != p.params().size())
        throw std::invalid_argument("run " + p.name() + ": wrong argument count");
    std::vector<uint32_t> base;
    base.reserve(args.size() + p.locals().size());
    for (size_t k = 0; k < args.size(); ++k) {
        const RegInfo& info = live_reg(args[k]);
        if (info.radix != p.params()[k].radix) throw RadixMismatch("run " + p.name() + ": argument radix mismatch");
        if (info.width != p.params()[k].width)
            throw RadixMismatch("run " + p.name() + ": argument width mismatch");
        for (size_t j = 0; j < k; ++j)
            if (args[j].id == args[k].id) throw std::invalid_argument("run " + p.name() + ": aliased arguments");
        base.push_back(info.offset);
    }
    exec(p, inverse, base);
}

void Machine::exec(const Program& p, bool inv, std::vector<uint32_t>& base) {
    if (observer_) observer_(p, inv, true, *this);
    const bool shortcut =
        p.shortcut_ && (p.opaque_ || (opt_.use_shortcuts && p.stats_.gates >= opt_.shortcut_min_gates));
    if (!shortcut && p.opaque_) throw OpaqueProgram(p.name_ + " has no expansion and no shortcut");

    if (shortcut) {
        std::vector<std::span<uint8_t>> spans;
        spans.reserve(p.params_.size());
        for (size_t k = 0; k < p.params_.size(); ++k) spans.emplace_back(cells_.data() + base[k], p.params_[k].width);
        peak_cells_ = std::max(peak_cells_, live_cells_ + p.stats_.peak_cells);
        peak_bits_ = std::max(peak_bits_, live_bits_ + p.stats_.peak_bits);
        p.shortcut_(spans, inv);
        gate_count_ += p.stats_.gates;
        calculate_calls_ += p.stats_.calculate_calls;
        if (observer_) observer_(p, inv, false, *this);
        return;
    }

    const uint32_t saved_top = top_;
    int64_t lcells = 0, lbits = 0;
    for (const Shape& s : p.locals_) {
        base.push_back(top_);
        top_ += s.width;
        lcells += s.width;
        lbits += int64_t(s.width) * cell_bits(s.radix);
    }
    if (cells_.size() < top_) cells_.resize(top_, 0);
    bump_live(lcells, lbits);
    if (p.calculate_) ++calculate_calls_;

    const size_t n = p.seq_.size();
    std::vector<uint32_t> callee_base;
    for (size_t s = 0; s < n; ++s) {
        const uint32_t e = p.seq_[inv ? n - 1 - s : s];
        if (e & Program::kCallBit) {
            const Call& c = p.calls_[e & ~Program::kCallBit];
            callee_base.clear();
            for (const Binding& b : c.bind) callee_base.push_back(base[b.slot] + b.offset);
            exec(*c.callee, inv != c.inverse, callee_base);
            continue;
        }
        const Gate& g = p.gates_[e];
        uint8_t* C = cells_.data();
        bool fire = true;
        for (int k = 0; k < g.ncond; ++k)
            fire &= C[base[g.cond[k].cell.slot] + g.cond[k].cell.idx] == g.cond[k].value;
        ++gate_count_;
        if (!fire) continue;
        uint8_t& a = C[base[g.a.slot] + g.a.idx];
        if (g.op == Gate::Op::Swap)
            std::swap(a, C[base[g.b.slot] + g.b.idx]);
        else
            a = inv ? g.iperm[a] : g.perm[a];
    }

    for (uint32_t k = saved_top; k < top_; ++k) {
        if (cells_[k] != 0) {
            std::string msg = p.name_ + (inv ? " (inverse)" : "") + " returned with a dirty ancilla";
            if (p.calculate_) throw OracleContractViolation(msg);
            throw AncillaNotClean(msg);
        }
    }
    bump_live(-lcells, -lbits);
    top_ = saved_top;
    base.resize(p.params_.size());
    if (observer_) observer_(p, inv, false, *this);
}

}  // namespace hfchc
