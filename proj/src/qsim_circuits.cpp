// Reversible Calculate_i and Check. Every structural predicate is built from
// edge-status queries: the status of edge e in the current state is read by
// two EffContains calls (is e+1 in X, is e+1+m in X) on a constant loaded
// into a scratch register. Predicates are computed into scratch bits on a
// tape, used once as a control, and uncomputed by replaying the tape
// backwards; every taped operation is self-inverse.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "hfchc/circuits.hpp"
#include "hfchc/encoding.hpp"
#include "hfchc/eppstein.hpp"
#include "hfchc/errors.hpp"
#include "hfchc/qsim.hpp"

namespace hfchc::qsim {

namespace {

using circ::AndFlag;

// A boolean wire: a constant or a control condition on one cell.
struct Lit {
    enum Kind : uint8_t { False, True, Wire } kind = False;
    Cond c{};

    static Lit of(bool v) { return {v ? True : False, {}}; }
    static Lit wire(Cond c) { return {Wire, c}; }
    bool is_const() const { return kind != Wire; }
    bool value() const { return kind == True; }
};

Lit neg(Lit l) {
    if (l.is_const()) return Lit::of(!l.value());
    return Lit::wire({l.c.cell, uint8_t(1 - l.c.value)});
}

struct EdgeLits {
    Lit live, forced, free;
};

uint64_t read_uint(std::span<const uint8_t> cells) {
    uint64_t v = 0;
    for (size_t k = cells.size(); k-- > 0;) v = (v << 1) | cells[k];
    return v;
}

void write_uint(std::span<uint8_t> cells, uint64_t v) {
    for (auto& c : cells) {
        c = uint8_t(v & 1);
        v >>= 1;
    }
}

// Elements of a state held as separate basic-encoding blocks.
std::vector<uint32_t> decode_blocks(uint32_t N, const std::vector<uint32_t>& sizes,
                                    std::span<const std::span<uint8_t>> blocks) {
    std::vector<uint32_t> X;
    for (size_t j = 0; j < sizes.size(); ++j) {
        auto part = decode_basic(N, sizes[j], TritString(blocks[j].begin(), blocks[j].end()));
        X.insert(X.end(), part.begin(), part.end());
    }
    return X;
}

std::vector<Reg> split_blocks(const Reg& flat, uint32_t N, uint32_t k) {
    std::vector<Reg> out;
    uint32_t off = 0;
    for (uint32_t s : eff_block_sizes(k)) {
        out.push_back(flat.sub(off, capacity(N, s)));
        off += capacity(N, s);
    }
    return out;
}

// Predicate builder over one program body. Owns a query register and a tape
// of self-inverse operations that unwind() replays in reverse.
class Tape {
public:
    Tape(ProgramBuilder& b, const Instance& q, std::vector<Reg> blocks, uint32_t k)
        : b_(b), q_(q), blocks_(std::move(blocks)), effc_(eff_contains_prog(q.N(), k, b.count_only())),
          xq_(b.local(bitlen(q.N()))) {}

    size_t mark() const { return ops_.size(); }

    void unwind(size_t mark) {
        while (ops_.size() > mark) {
            Op op = std::move(ops_.back());
            ops_.pop_back();
            switch (op.kind) {
            case Op::Alloc: b_.release(op.reg); break;
            case Op::Mcx: circ::mcx(b_, op.conds, op.target); break;
            case Op::Query: emit_query(op.elem, op.target, true); break;
            case Op::Call: b_.call(op.prog, op.args, true); break;
            }
        }
        std::erase_if(cache_, [&](const auto& kv) { return kv.second.second >= mark; });
    }

    Lit query(uint32_t elem) {
        const Reg t = fresh();
        emit_query(elem, t[0], false);
        ops_.push_back({Op::Query, {}, t[0], elem, {}, nullptr, {}});
        return Lit::wire({t[0], 1});
    }

    // A sub-program that xors one predicate bit into its last parameter.
    Lit call_bit(const ProgramPtr& p, std::vector<Reg> args) {
        const Reg t = fresh();
        args.push_back(t);
        b_.call(p, args);
        ops_.push_back({Op::Call, {}, {}, 0, {}, p, std::move(args)});
        return Lit::wire({t[0], 1});
    }

    EdgeLits edge(uint32_t e) {
        if (auto it = cache_.find(e); it != cache_.end()) return it->second.first;
        const FchcInstance& base = q_.base();
        EdgeLits s;
        if (!base.live(e)) s = {Lit::of(false), Lit::of(false), Lit::of(false)};
        else if (base.forced(e)) s = {Lit::of(true), Lit::of(true), Lit::of(false)};
        else {
            const size_t at = mark();
            const Lit f = query(q_.force_elem(e)), d = query(q_.delete_elem(e));
            s = {neg(d), f, all({neg(f), neg(d)})};
            cache_[e] = {s, at};
            return s;
        }
        cache_[e] = {s, SIZE_MAX};
        return s;
    }

    Lit all(const std::vector<Lit>& ls) {
        std::vector<Cond> cs;
        for (const Lit& l : ls) {
            if (l.is_const()) {
                if (!l.value()) return Lit::of(false);
                continue;
            }
            cs.push_back(l.c);
        }
        if (cs.empty()) return Lit::of(true);
        if (cs.size() == 1) return Lit::wire(cs[0]);
        const Reg t = fresh();
        mcx(cs, t[0]);
        return Lit::wire({t[0], 1});
    }

    Lit any(const std::vector<Lit>& ls) {
        std::vector<Lit> n;
        for (const Lit& l : ls) n.push_back(neg(l));
        return neg(all(n));
    }

    // [pred(number of true literals)], by one controlled flip per satisfying
    // assignment of the non-constant literals.
    Lit count(const std::vector<Lit>& ls, const std::function<bool(uint32_t)>& pred) {
        uint32_t base = 0;
        std::vector<Cond> vars;
        for (const Lit& l : ls) {
            if (l.is_const()) base += l.value();
            else vars.push_back(l.c);
        }
        const uint32_t k = uint32_t(vars.size());
        uint32_t hits = 0;
        for (uint32_t mask = 0; mask < (1u << k); ++mask) hits += pred(base + std::popcount(mask));
        if (hits == 0) return Lit::of(false);
        if (hits == (1u << k)) return Lit::of(true);
        const Reg t = fresh();
        for (uint32_t mask = 0; mask < (1u << k); ++mask) {
            if (!pred(base + std::popcount(mask))) continue;
            std::vector<Cond> cs;
            for (uint32_t j = 0; j < k; ++j)
                cs.push_back({vars[j].cell, uint8_t((mask >> j) & 1 ? vars[j].value : 1 - vars[j].value)});
            mcx(cs, t[0]);
        }
        return Lit::wire({t[0], 1});
    }

    // ----- derived predicates on the current state

    Lit live_degree_is(uint32_t v, const std::function<bool(uint32_t)>& pred) {
        std::vector<Lit> ls;
        for (uint32_t e : q_.base().graph().incident(v)) ls.push_back(edge(e).live);
        return count(ls, pred);
    }
    Lit forced_degree_is(uint32_t v, const std::function<bool(uint32_t)>& pred) {
        std::vector<Lit> ls;
        for (uint32_t e : q_.base().graph().incident(v)) ls.push_back(edge(e).forced);
        return count(ls, pred);
    }
    Lit forced_incident(uint32_t v) {
        std::vector<Lit> ls;
        for (uint32_t e : q_.base().graph().incident(v)) ls.push_back(edge(e).forced);
        return any(ls);
    }
    Lit cycle_free(const FourCycle& c) {
        std::vector<Lit> ls;
        for (uint32_t e : c.e) ls.push_back(edge(e).free);
        return all(ls);
    }
    // Free 4-cycle with every corner of free degree exactly 2.
    Lit isolated_cycle(const FourCycle& c) {
        std::vector<Lit> ls{cycle_free(c)};
        for (uint32_t v : c.v)
            for (uint32_t f : q_.base().graph().incident(v))
                if (!c.has_edge(f)) ls.push_back(neg(edge(f).free));
        return all(ls);
    }
    // The cycle bits of one edge are held together; an edge's 4-cycles and
    // their spokes span a bounded neighbourhood, so this stays O(1) wide.
    Lit in_isolated(uint32_t e) {
        std::vector<Lit> ls;
        for (uint32_t ci : q_.base().data().cycles_of_edge[e]) ls.push_back(isolated_cycle(q_.base().data().cycles[ci]));
        return any(ls);
    }
    Lit free_cycles_through_is_one(uint32_t e) {
        std::vector<Lit> ls;
        for (uint32_t ci : q_.base().data().cycles_of_edge[e]) ls.push_back(cycle_free(q_.base().data().cycles[ci]));
        return count(ls, [](uint32_t c) { return c == 1; });
    }

    ProgramBuilder& b() { return b_; }

private:
    struct Op {
        enum Kind : uint8_t { Alloc, Mcx, Query, Call } kind;
        std::vector<Cond> conds;
        CellRef target;
        uint32_t elem;
        Reg reg;
        ProgramPtr prog;
        std::vector<Reg> args;
    };

    Reg fresh() {
        const Reg t = b_.scratch(1);
        ops_.push_back({Op::Alloc, {}, {}, 0, t, nullptr, {}});
        return t;
    }

    void mcx(const std::vector<Cond>& cs, CellRef t) {
        circ::mcx(b_, cs, t);
        ops_.push_back({Op::Mcx, cs, t, 0, {}, nullptr, {}});
    }

    void emit_query(uint32_t elem, CellRef out, bool inverse) {
        circ::xor_const(b_, xq_, elem);
        std::vector<Reg> args = blocks_;
        args.push_back(xq_);
        args.push_back(Reg{out.slot, out.idx, 1, 2});
        b_.call(effc_, args, inverse);
        circ::xor_const(b_, xq_, elem);
    }

    ProgramBuilder& b_;
    const Instance& q_;
    std::vector<Reg> blocks_;
    ProgramPtr effc_;
    Reg xq_;
    std::vector<Op> ops_;
    std::map<uint32_t, std::pair<EdgeLits, size_t>> cache_;
};

enum class Act : uint8_t { Zero, One, Nu };

class Compiler {
public:
    Compiler(const Instance& q, const CircuitOptions& opt)
        : q_(q), opt_(opt), N_(q.N()), w_(bitlen(q.N())) {
        const uint64_t bound = 3ull * q.n() + 8ull * q.base().data().cycles.size() + 1;
        cnt_w_ = bitlen(bound);
    }

    ProgramPtr calculate(uint32_t i) {
        ProgramBuilder b("calculate[" + std::to_string(i) + "]", opt_.count_only);
        Reg nu = b.param(q_.r());
        std::vector<Reg> blocks = block_params(b, i - 1);
        Reg x = b.param(w_);
        Reg fc = b.local(3), fb = b.local(1), e = b.local(w_), a = b.local(1);
        std::vector<Reg> args{nu};
        args.insert(args.end(), blocks.begin(), blocks.end());
        for (Reg r : {fc, fb, e, a}) args.push_back(r);
        ProgramPtr cas = cascade(i);
        b.call(cas, args);
        circ::xor_reg(b, e, x);
        circ::add_const(b, x, q_.m(), std::vector<Cond>{{a[0], 1}});
        b.call(cas, args, true);
        b.set_calculate(true);
        if (opt_.shortcuts || opt_.count_only) {
            const Instance q = q_;
            const std::vector<uint32_t> sizes = eff_block_sizes(i - 1);
            b.set_shortcut([q, sizes, i](std::span<const std::span<uint8_t>> ps, bool inverse) {
                const auto X = decode_blocks(q.N(), sizes, ps.subspan(1, sizes.size()));
                const Step st = qsim::calculate(q, apply_elements(q, X), i, ps[0][i - 1] != 0);
                const bool act = st.element > q.m() && st.element <= 2 * q.m();
                const uint64_t ev = act ? st.element - q.m() : st.element;
                const uint64_t add = act ? q.m() : 0;
                std::span<uint8_t> x = ps[sizes.size() + 1];
                const uint64_t mask = (uint64_t(1) << x.size()) - 1;
                const uint64_t xv = read_uint(x);
                write_uint(x, inverse ? ((xv - add) & mask) ^ ev : ((xv ^ ev) + add) & mask);
            });
        }
        return b.build();
    }

    // (nu, blocks, fc, fb, e, a): the seven check-and-select blocks in order.
    ProgramPtr cascade(uint32_t i) {
        ProgramBuilder b("cascade[" + std::to_string(i) + "]", opt_.count_only);
        std::vector<Reg> args{b.param(q_.r())};
        for (Reg r : block_params(b, i - 1)) args.push_back(r);
        args.push_back(b.param(3));
        args.push_back(b.param(1));
        args.push_back(b.param(w_));
        args.push_back(b.param(1));
        for (int kase = 1; kase <= 7; ++kase) b.call(ccs(i, kase), args);
        return b.build();
    }

    // One check-and-select block. The scan finds the first candidate of this
    // case into temporaries; they are copied out only while fc is still 0,
    // then fc counts this and every later block once fb is set.
    ProgramPtr ccs(uint32_t i, int kase) {
        ProgramBuilder b("ccs[" + std::to_string(i) + "," + std::to_string(kase) + "]", opt_.count_only);
        Reg nu = b.param(q_.r());
        std::vector<Reg> blocks = block_params(b, i - 1);
        Reg fc = b.param(3), fb = b.param(1), e = b.param(w_), a = b.param(1);
        Reg cnt = b.local(cnt_w_), et = b.local(w_), at = b.local(1), ft = b.local(1);
        std::vector<Reg> sargs{nu};
        sargs.insert(sargs.end(), blocks.begin(), blocks.end());
        for (Reg r : {cnt, et, at, ft}) sargs.push_back(r);
        ProgramPtr sc = scan(i, kase);
        b.call(sc, sargs);
        {
            AndFlag z(b, circ::eq_const(fc, 0));
            circ::xor_reg(b, et, e, z.conds());
            circ::mcx(b, circ::join(z.conds(), std::vector<Cond>{{at[0], 1}}), a[0]);
            circ::mcx(b, circ::join(z.conds(), std::vector<Cond>{{ft[0], 1}}), fb[0]);
        }
        circ::add_const(b, fc, 1, std::vector<Cond>{{fb[0], 1}});
        b.call(sc, sargs, true);
        return b.build();
    }

    // (nu, blocks, cnt, e, a, fb): writes the first firing candidate of the
    // case. cnt leaves 0 right after the first firing, which blocks the rest.
    ProgramPtr scan(uint32_t i, int kase) {
        ProgramBuilder b("scan[" + std::to_string(i) + "," + std::to_string(kase) + "]", opt_.count_only);
        Reg nu = b.param(q_.r());
        std::vector<Reg> blocks = block_params(b, i - 1);
        Reg cnt = b.param(cnt_w_), et = b.param(w_), at = b.param(1), ft = b.param(1);
        Tape T(b, q_, blocks, i - 1);
        const MultiGraph& g = q_.base().graph();
        const FchcInstance& base = q_.base();
        const auto& cycles = base.data().cycles;

        auto select = [&](Lit P, uint32_t ev, Act act) {
            if (P.is_const() && !P.value()) return;
            std::vector<Cond> cs = circ::eq_const(cnt, 0);
            if (!P.is_const()) cs.push_back(P.c);
            {
                AndFlag f(b, cs);
                circ::xor_const(b, et, ev, f.conds());
                if (act == Act::One) circ::mcx(b, f.conds(), at[0]);
                if (act == Act::Nu) circ::mcx(b, circ::join(f.conds(), std::vector<Cond>{{nu[i - 1], 1}}), at[0]);
                circ::mcx(b, f.conds(), ft[0]);
            }
            circ::add_const(b, cnt, 1, std::vector<Cond>{{ft[0], 1}});
        };
        auto candidate = [&](const std::vector<Lit>& ls, uint32_t ev, Act act) {
            const size_t mk = T.mark();
            select(T.all(ls), ev, act);
            T.unwind(mk);
        };
        auto spokes_of = [&](const FourCycle& c, uint32_t v) {
            std::vector<uint32_t> out;
            for (uint32_t f : g.incident(v))
                if (!c.has_edge(f) && base.free(f)) out.push_back(f);
            return out;
        };

        switch (kase) {
        case 1:
            for (uint32_t v = 0; v < g.n(); ++v) {
                const size_t mk = T.mark();
                const Lit d2 = T.live_degree_is(v, [](uint32_t d) { return d == 2; });
                for (uint32_t e : g.incident(v))
                    if (base.free(e)) candidate({d2, T.edge(e).free}, q_.force_elem(e), Act::Zero);
                T.unwind(mk);
            }
            break;
        case 2:
            for (uint32_t v = 0; v < g.n(); ++v) {
                if (g.degree(v) != 3) continue;
                const size_t mk = T.mark();
                const Lit d3 = T.live_degree_is(v, [](uint32_t d) { return d == 3; });
                const Lit f2 = T.forced_degree_is(v, [](uint32_t d) { return d == 2; });
                for (uint32_t e : g.incident(v))
                    if (base.free(e)) candidate({d3, f2, T.edge(e).free}, q_.force_elem(e), Act::One);
                T.unwind(mk);
            }
            break;
        case 3:
            for (const FourCycle& c : cycles) {
                const size_t mk = T.mark();
                const Lit cf = T.cycle_free(c);
                for (uint32_t p = 0; p < 2 && !(cf.is_const() && !cf.value()); ++p) {
                    const size_t mp = T.mark();
                    const Lit pf = T.all({T.forced_incident(c.v[p]), T.forced_incident(c.v[p + 2])});
                    std::vector<uint32_t> sp = spokes_of(c, c.v[p + 1]), s2 = spokes_of(c, c.v[(p + 3) % 4]);
                    sp.insert(sp.end(), s2.begin(), s2.end());
                    std::sort(sp.begin(), sp.end());
                    for (uint32_t e : sp) candidate({cf, pf, T.edge(e).free}, q_.force_elem(e), Act::Zero);
                    T.unwind(mp);
                }
                T.unwind(mk);
            }
            break;
        case 4: {
            const uint32_t dummy = q_.dummy_elem(i);
            for (uint32_t v = 0; v < g.n(); ++v) {
                const size_t mk = T.mark();
                const Lit low = T.live_degree_is(v, [](uint32_t d) { return d <= 1; });
                const Lit three = T.forced_degree_is(v, [](uint32_t d) { return d >= 3; });
                select(T.any({low, three}), dummy, Act::Zero);
                T.unwind(mk);
            }
            const size_t mk = T.mark();
            select(T.call_bit(collection(i - 1), blocks), dummy, Act::Zero);
            T.unwind(mk);
            break;
        }
        case 5:
            for (const FourCycle& c : cycles) {
                const size_t mk = T.mark();
                const Lit cf = T.cycle_free(c);
                if (!(cf.is_const() && !cf.value())) {
                    std::array<Lit, 4> fin;
                    for (int k = 0; k < 4; ++k) fin[k] = T.forced_incident(c.v[k]);
                    const Lit two = T.count({fin.begin(), fin.end()}, [](uint32_t x) { return x == 2; });
                    std::array<int, 4> order{0, 1, 2, 3};
                    std::sort(order.begin(), order.end(), [&](int x, int y) { return c.v[x] < c.v[y]; });
                    for (int k : order)
                        for (uint32_t e : spokes_of(c, c.v[k]))
                            candidate({cf, two, neg(fin[k]), T.edge(e).free}, q_.force_elem(e), Act::Nu);
                }
                T.unwind(mk);
            }
            break;
        case 6: {
            const Lit g6 = T.call_bit(forced_degree_one(i - 1), blocks);
            for (uint32_t y = 0; y < g.n(); ++y) {
                const size_t mk = T.mark();
                const Lit fy = T.forced_incident(y);
                for (uint32_t e : g.incident(y)) {
                    if (!base.free(e)) continue;
                    const size_t me = T.mark();
                    const Lit iso = T.in_isolated(e);
                    candidate({g6, fy, T.edge(e).free, neg(iso)}, q_.force_elem(e), Act::Nu);
                    T.unwind(me);
                }
                T.unwind(mk);
            }
            T.unwind(0);
            break;
        }
        case 7:
            for (uint32_t e = 0; e < g.m(); ++e) {
                if (!base.free(e)) continue;
                const size_t mk = T.mark();
                const Lit iso = T.in_isolated(e);
                candidate({T.edge(e).free, neg(iso)}, q_.force_elem(e), Act::Nu);
                T.unwind(mk);
            }
            break;
        default: throw std::invalid_argument("ccs case out of range");
        }
        return b.build();
    }

    // (blocks, out): out ^= [the free graph is a disjoint union of 4-cycles
    // and isolated vertices], tested as "no free edge lies on a number of
    // free 4-cycles other than one".
    ProgramPtr collection(uint32_t k) {
        return counter_test("collection", k, q_.m(), true, [&](Tape& T, uint32_t e) {
            if (!q_.base().free(e)) return Lit::of(false);
            return T.all({T.edge(e).free, neg(T.free_cycles_through_is_one(e))});
        });
    }

    // (blocks, out): out ^= [some vertex has exactly one forced edge].
    ProgramPtr forced_degree_one(uint32_t k) {
        return counter_test("fdeg1", k, q_.n(), false, [&](Tape& T, uint32_t v) {
            return T.forced_degree_is(v, [](uint32_t d) { return d == 1; });
        });
    }

    // (blocks, out): out ^= [no vertex has live degree 1 or three forced edges].
    ProgramPtr degree_ok(uint32_t k) {
        return counter_test("degree_ok", k, q_.n(), true, [&](Tape& T, uint32_t v) {
            const Lit one = T.live_degree_is(v, [](uint32_t d) { return d == 1; });
            const Lit three = T.forced_degree_is(v, [](uint32_t d) { return d >= 3; });
            return T.any({one, three});
        });
    }

    // (blocks of Z_r, v, w, out): out ^= [v ~ w in G minus deleted edges].
    // One EffContains call per incidence slot of v: the deletion element of
    // the slot's edge is copied into the query register only when the slot
    // leads to w, so the call answers "w is reached through a deleted edge".
    ProgramPtr adjacency() {
        const uint32_t vb = bitlen(q_.n() - 1);
        ProgramBuilder b("adjacency", opt_.count_only);
        std::vector<Reg> blocks = block_params(b, q_.r());
        Reg v = b.param(vb), w = b.param(vb), out = b.param(1);
        Reg ek = b.local(w_), tg = b.local(vb), valid = b.local(1), cf = b.local(1), mk = b.local(1), xq = b.local(w_);
        ProgramPtr effc = eff_contains_prog(N_, q_.r(), opt_.count_only);
        const MultiGraph& g = q_.base().graph();
        auto lookup = [&](uint32_t slot) {
            for (uint32_t u = 0; u < g.n(); ++u) {
                if (g.incident(u).size() <= slot) continue;
                const uint32_t e = g.incident(u)[slot];
                if (!q_.base().live(e)) continue;
                AndFlag f(b, circ::eq_const(v, u));
                circ::xor_const(b, ek, q_.delete_elem(e), f.conds());
                circ::xor_const(b, tg, g.edge(e).other(u), f.conds());
                circ::mcx(b, f.conds(), (q_.base().forced(e) ? cf : valid)[0]);
            }
        };
        for (uint32_t slot = 0; slot < 3; ++slot) {
            lookup(slot);
            circ::flip_if_equal(b, tg, w, mk[0]);
            const std::vector<Cond> via_free{{mk[0], 1}, {valid[0], 1}};
            circ::xor_reg(b, ek, xq, via_free);
            circ::mcx(b, via_free, out[0]);
            circ::mcx(b, std::vector<Cond>{{mk[0], 1}, {cf[0], 1}}, out[0]);
            std::vector<Reg> args = blocks;
            args.push_back(xq);
            args.push_back(out);
            b.call(effc, args);
            circ::xor_reg(b, ek, xq, via_free);
            circ::flip_if_equal(b, tg, w, mk[0]);
            lookup(slot);
        }
        return b.build();
    }

    // (blocks of Z_r, out): out ^= [G minus deleted edges is connected].
    // A modeled oracle: the traversal runs classically over the adjacency
    // predicate and is charged one adjacency circuit per vertex pair, plus
    // two vertex registers and a visited marker's worth of ancilla.
    ProgramPtr connectivity() {
        ProgramBuilder b("connectivity", true);
        block_params(b, q_.r());
        b.param(1);
        const ProgramStats adj = adjacency_stats();
        const uint64_t n = q_.n(), vb = bitlen(n - 1);
        const uint64_t extra = 2 * vb + 2;
        b.add_declared_cost({n * n * adj.gates, 0, adj.peak_cells + extra, adj.peak_bits + extra});
        const Instance q = q_;
        const std::vector<uint32_t> sizes = eff_block_sizes(q_.r());
        b.set_shortcut([q, sizes](std::span<const std::span<uint8_t>> ps, bool) {
            const FchcInstance st = apply_elements(q, decode_blocks(q.N(), sizes, ps.first(sizes.size())));
            std::vector<bool> seen(q.n(), false);
            std::vector<uint32_t> stack{0};
            seen[0] = true;
            uint32_t reached = 1;
            while (!stack.empty()) {
                const uint32_t v = stack.back();
                stack.pop_back();
                for (uint32_t w = 0; w < q.n(); ++w)
                    if (!seen[w] && adjacent(q, st, v, w)) {
                        seen[w] = true;
                        ++reached;
                        stack.push_back(w);
                    }
            }
            if (reached == q.n()) ps[sizes.size()][0] ^= 1;
        });
        return b.build();
    }

    ProgramPtr check() {
        ProgramBuilder b("check", opt_.count_only);
        Reg eff = b.param(eff_width(N_, q_.r()), 3);
        Reg out = b.param(1);
        std::vector<Reg> blocks = split_blocks(eff, N_, q_.r());
        Reg ok = b.local(3);
        const std::array<ProgramPtr, 3> parts{degree_ok(q_.r()), collection(q_.r()), connectivity()};
        for (uint32_t k = 0; k < 3; ++k) {
            std::vector<Reg> args = blocks;
            args.push_back(ok.sub(k, 1));
            b.call(parts[k], args);
        }
        circ::mcx(b, std::vector<Cond>{{ok[0], 1}, {ok[1], 1}, {ok[2], 1}}, out[0]);
        for (uint32_t k = 3; k-- > 0;) {
            std::vector<Reg> args = blocks;
            args.push_back(ok.sub(k, 1));
            b.call(parts[k], args, true);
        }
        if (opt_.shortcuts || opt_.count_only) {
            const Instance q = q_;
            const std::vector<uint32_t> sizes = eff_block_sizes(q_.r());
            b.set_shortcut([q, sizes](std::span<const std::span<uint8_t>> ps, bool) {
                const auto X = decode_eff(q.N(), q.r(), TritString(ps[0].begin(), ps[0].end()));
                if (qsim::check(q, apply_elements(q, X))) ps[1][0] ^= 1;
            });
        }
        return b.build();
    }

private:
    std::vector<Reg> block_params(ProgramBuilder& b, uint32_t k) {
        std::vector<Reg> out;
        for (uint32_t s : eff_block_sizes(k)) out.push_back(b.param(capacity(N_, s), 3));
        return out;
    }

    ProgramStats adjacency_stats() {
        if (!adj_stats_) adj_stats_ = adjacency()->stats();
        return *adj_stats_;
    }

    // Counts the items whose predicate holds into a register, flips out on
    // the count being zero (or nonzero), and uncounts.
    ProgramPtr counter_test(const std::string& name, uint32_t k, uint32_t items, bool when_zero,
                            const std::function<Lit(Tape&, uint32_t)>& pred) {
        const uint32_t vw = bitlen(items);
        ProgramBuilder sb(name + "_count", opt_.count_only);
        {
            std::vector<Reg> blocks = block_params(sb, k);
            Reg V = sb.param(vw);
            Tape T(sb, q_, blocks, k);
            for (uint32_t it = 0; it < items; ++it) {
                const size_t mk = T.mark();
                const Lit p = pred(T, it);
                if (!p.is_const()) circ::add_const(sb, V, 1, std::vector<Cond>{p.c});
                else if (p.value()) circ::add_const(sb, V, 1);
                T.unwind(mk);
            }
        }
        ProgramPtr counter = sb.build();
        ProgramBuilder b(name, opt_.count_only);
        std::vector<Reg> args = block_params(b, k);
        Reg out = b.param(1);
        Reg V = b.local(vw);
        args.push_back(V);
        b.call(counter, args);
        if (!when_zero) b.x(out[0]);
        circ::mcx(b, circ::eq_const(V, 0), out[0]);
        b.call(counter, args, true);
        return b.build();
    }

    const Instance& q_;
    CircuitOptions opt_;
    uint32_t N_;
    uint32_t w_;
    uint32_t cnt_w_ = 1;
    std::optional<ProgramStats> adj_stats_;
};

void require_steps(const Instance& q) {
    if (q.r() == 0) throw std::invalid_argument("qsim circuits need r >= 1");
}

}  // namespace

ProgramPtr calculate_prog(const Instance& q, uint32_t i, const CircuitOptions& opt) {
    if (i < 1 || i > q.r()) throw std::out_of_range("calculate_prog: i outside [1, r]");
    return Compiler(q, opt).calculate(i);
}

ProgramPtr cascade_prog(const Instance& q, uint32_t i, bool count_only) {
    if (i < 1 || i > q.r()) throw std::out_of_range("cascade_prog: i outside [1, r]");
    return Compiler(q, {false, count_only}).cascade(i);
}

OracleFamily oracle_family(const Instance& q, const CircuitOptions& opt) {
    require_steps(q);
    OracleFamily fam;
    fam.N = q.N();
    fam.r = q.r();
    fam.nu_width = q.r();
    fam.count_only = opt.count_only;
    fam.calculate = [q, opt](uint32_t i) { return calculate_prog(q, i, opt); };
    return fam;
}

ProgramPtr reduce_prog(const Instance& q, const CircuitOptions& opt) {
    return SetGenerator(oracle_family(q, opt)).generate();
}

ProgramPtr check_prog(const Instance& q, const CircuitOptions& opt) {
    require_steps(q);
    return Compiler(q, opt).check();
}

ProgramPtr adjacency_prog(const Instance& q, bool count_only) {
    require_steps(q);
    return Compiler(q, {false, count_only}).adjacency();
}

SpaceReport qubit_accounting(const Instance& q) {
    require_steps(q);
    const CircuitOptions co{false, true};
    const ProgramPtr red = reduce_prog(q, co), chk = check_prog(q, co);
    SpaceReport s;
    s.nu_cells = q.r();
    s.eff_cells = eff_width(q.N(), q.r());
    s.out_cells = 1;
    s.ancilla_cells = std::max(red->stats().peak_cells, chk->stats().peak_cells);
    s.ancilla_bits = std::max(red->stats().peak_bits, chk->stats().peak_bits);
    s.total_cells = s.nu_cells + s.eff_cells + s.out_cells + s.ancilla_cells;
    s.total_bits = s.nu_cells + 2 * s.eff_cells + s.out_cells + s.ancilla_bits;
    s.ordered_list_bits = uint64_t(q.r()) * uint64_t(std::ceil(std::log2(double(q.N()))));
    s.eff_bound_trits = eff_bound(q.N(), q.r());
    s.reduce_calculate_calls = red->stats().calculate_calls;
    return s;
}

}  // namespace hfchc::qsim
