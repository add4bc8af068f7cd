#include "hfchc/setgen.hpp"

#include <bit>
#include <cstdio>

#include "hfchc/circuits.hpp"

namespace hfchc {

uint32_t two_adic(uint64_t i) { return i == 0 ? 64u : static_cast<uint32_t>(std::countr_zero(i)); }

const SetgenConstants& setgen_constants() {
    static const SetgenConstants c{12.0, 32.0};
    return c;
}

GenPlan GenPlan::make(uint32_t r) {
    if (r == 0) throw PlanViolation("plan: r must be positive");
    GenPlan p;
    p.r = r;
    uint32_t start = 0;
    for (int a = 31; a >= 0; --a) {
        if (!((r >> a) & 1)) continue;
        const uint32_t l = static_cast<uint32_t>(a);
        // Appending a 2^l block keeps the blocks of Z_start in binary-expansion order.
        if (start != 0 && l + 1 > two_adic(start)) throw PlanViolation("plan: block level exceeds valuation");
        p.blocks.push_back({start, l});
        start += 1u << l;
    }
    return p;
}

uint64_t GenPlan::total_calls() const {
    uint64_t t = 0;
    for (const auto& b : blocks) t += level_calls(b.level);
    return t;
}

uint64_t GenPlan::call_bound() const {
    const uint32_t top = std::bit_width(r) - 1;
    return 2 * ((uint64_t(1) << (2 * (top + 1))) - 1) / 3;
}

namespace {

std::vector<Reg> block_params(ProgramBuilder& b, uint32_t N, uint32_t count) {
    std::vector<Reg> out;
    for (uint32_t s : eff_block_sizes(count)) out.push_back(b.param(capacity(N, s), 3));
    return out;
}

// Sub-registers of a flat EffEnc region holding `count` elements.
std::vector<Reg> split_eff(const Reg& flat, uint32_t N, uint32_t count) {
    std::vector<Reg> out;
    uint32_t off = 0;
    for (uint32_t s : eff_block_sizes(count)) {
        const uint32_t w = capacity(N, s);
        out.push_back(flat.sub(off, w));
        off += w;
    }
    return out;
}

// Unions disjoint encodings parts[0..] (sizes given) left to right into out.
// Intermediate results live in scratch and are uncomputed before returning.
void union_chain(ProgramBuilder& b, uint32_t N, const std::vector<Reg>& parts, const std::vector<uint32_t>& sizes,
                 const Reg& out, bool count_only) {
    if (parts.size() == 1) {
        circ::add_trits(b, parts[0], out);
        return;
    }
    struct Step {
        ProgramPtr p;
        Reg a, c, dst;
    };
    std::vector<Step> steps;
    Reg acc = parts[0];
    uint32_t have = sizes[0];
    for (size_t j = 1; j < parts.size(); ++j) {
        const uint32_t total = have + sizes[j];
        Reg dst = j + 1 == parts.size() ? out : b.scratch(capacity(N, total), 3);
        ProgramPtr u = union_prog(N, have, sizes[j], count_only);
        b.call(u, {acc, parts[j], dst});
        steps.push_back({u, acc, parts[j], dst});
        acc = dst;
        have = total;
    }
    for (size_t j = steps.size() - 1; j-- > 0;) {
        b.call(steps[j].p, {steps[j].a, steps[j].c, steps[j].dst}, true);
        b.release(steps[j].dst);
    }
}

}  // namespace

bool parse_block_name(const std::string& name, uint32_t& i, uint32_t& l) {
    unsigned a = 0, c = 0;
    char tail = 0;
    if (std::sscanf(name.c_str(), "R[%u,%u]%c", &a, &c, &tail) < 2) return false;
    if (tail != ']' && tail != 0) return false;
    i = a;
    l = c;
    return true;
}

SetGenerator::SetGenerator(OracleFamily family) : fam_(std::move(family)), plan_(GenPlan::make(fam_.r)) {
    if (fam_.N == 0 || fam_.r > fam_.N) throw PlanViolation("setgen: need 1 <= r <= N");
    calc_.resize(fam_.r + 1);
}

ProgramPtr SetGenerator::calc(uint32_t i) {
    if (!calc_[i]) {
        calc_[i] = fam_.calculate(i);
        if (!calc_[i]->is_calculate()) throw OracleContractViolation("oracle " + std::to_string(i) + " is not tagged");
    }
    return calc_[i];
}

uint64_t SetGenerator::oracle_peak() {
    uint64_t a = 0;
    for (uint32_t i = 1; i <= fam_.r; ++i) a = std::max(a, calc(i)->stats().peak_cells);
    return a;
}

ProgramPtr SetGenerator::r_block(uint32_t i, uint32_t l) {
    if (l >= 31 || uint64_t(i) + (uint64_t(1) << l) > fam_.r)
        throw PlanViolation("R[" + std::to_string(i) + "," + std::to_string(l) + "]: runs past r");
    if (i != 0 && l > two_adic(i))
        throw PlanViolation("R[" + std::to_string(i) + "," + std::to_string(l) + "]: level above valuation");
    if (auto it = blocks_.find({i, l}); it != blocks_.end()) return it->second;

    const uint32_t N = fam_.N;
    ProgramBuilder b("R[" + std::to_string(i) + "," + std::to_string(l) + "]", fam_.count_only);
    Reg nu = b.param(fam_.nu_width);
    std::vector<Reg> zs = block_params(b, N, i);
    Reg out = b.param(capacity(N, 1u << l), 3);
    if (l == 0) {
        Reg x = b.local(bitlen(N));
        ProgramPtr c = calc(i + 1);
        std::vector<Reg> args{nu};
        args.insert(args.end(), zs.begin(), zs.end());
        args.push_back(x);
        b.call(c, args);
        b.call(convert_prog(N, fam_.count_only), {x, out});
        b.call(c, args, true);
    } else {
        const uint32_t h = 1u << (l - 1);
        Reg A = b.local(capacity(N, h), 3), B = b.local(capacity(N, h), 3);
        ProgramPtr lo = r_block(i, l - 1), hi = r_block(i + h, l - 1);
        std::vector<Reg> lo_args{nu};
        lo_args.insert(lo_args.end(), zs.begin(), zs.end());
        auto hi_args = lo_args;
        lo_args.push_back(A);
        hi_args.push_back(A);
        hi_args.push_back(B);
        ProgramPtr u = union_prog(N, h, h, fam_.count_only);
        b.call(lo, lo_args);
        b.call(hi, hi_args);
        b.call(u, {A, B, out});
        b.call(hi, hi_args, true);
        b.call(lo, lo_args, true);
    }
    ProgramPtr p = b.build();
    blocks_.emplace(std::make_pair(i, l), p);
    return p;
}

ProgramPtr SetGenerator::generate() {
    if (gen_) return gen_;
    const uint32_t N = fam_.N;
    ProgramBuilder b("generate", fam_.count_only);
    Reg nu = b.param(fam_.nu_width);
    Reg eff = b.param(eff_width(N, fam_.r), 3);
    std::vector<Reg> parts = split_eff(eff, N, fam_.r);
    for (size_t j = 0; j < plan_.blocks.size(); ++j) {
        std::vector<Reg> args{nu};
        args.insert(args.end(), parts.begin(), parts.begin() + long(j));
        args.push_back(parts[j]);
        b.call(r_block(plan_.blocks[j].start, plan_.blocks[j].level), args);
    }
    gen_ = b.build();
    return gen_;
}

ProgramPtr SetGenerator::eff_to_basic() {
    if (basic_) return basic_;
    const uint32_t N = fam_.N;
    ProgramBuilder b("eff_to_basic", fam_.count_only);
    Reg nu = b.param(fam_.nu_width);
    Reg out = b.param(capacity(N, fam_.r), 3);
    Reg eff = b.local(eff_width(N, fam_.r), 3);
    ProgramPtr g = generate();
    b.call(g, {nu, eff});
    union_chain(b, N, split_eff(eff, N, fam_.r), eff_block_sizes(fam_.r), out, fam_.count_only);
    b.call(g, {nu, eff}, true);
    basic_ = b.build();
    return basic_;
}

// naive[i]: (nu, eff_width(N, i) trits) from zero to EffEnc(Z_i), rebuilding
// Z_{i-1} from scratch both to compute x_i and to erase it afterwards.
ProgramPtr SetGenerator::naive_step(uint32_t i) {
    if (auto it = naive_.find(i); it != naive_.end()) return it->second;
    const uint32_t N = fam_.N;
    ProgramBuilder b("naive[" + std::to_string(i) + "]", fam_.count_only);
    Reg nu = b.param(fam_.nu_width);
    Reg out = b.param(eff_width(N, i), 3);
    Reg E = b.local(std::max(1u, eff_width(N, i - 1)), 3);
    Reg x = b.local(bitlen(N));
    Reg s = b.local(capacity(N, 1), 3);
    std::vector<Reg> prev = split_eff(E, N, i - 1), next = split_eff(out, N, i);
    std::vector<uint32_t> prev_sizes = eff_block_sizes(i - 1);
    ProgramPtr below = i > 1 ? naive_step(i - 1) : nullptr;
    ProgramPtr c = calc(i);
    std::vector<Reg> cargs{nu};
    cargs.insert(cargs.end(), prev.begin(), prev.end());
    cargs.push_back(x);

    if (below) b.call(below, {nu, E.sub(0, eff_width(N, i - 1))});
    b.call(c, cargs);
    b.call(convert_prog(N, fam_.count_only), {x, s});
    // Blocks of i - 1 above its trailing run of ones carry over unchanged; the
    // trailing blocks and the new singleton merge into the last block of i.
    const size_t keep = next.size() - 1;
    for (size_t j = 0; j < keep; ++j) circ::add_trits(b, prev[j], next[j]);
    std::vector<Reg> merge{s};
    std::vector<uint32_t> sizes{1};
    for (size_t j = prev.size(); j-- > keep;) {
        merge.push_back(prev[j]);
        sizes.push_back(prev_sizes[j]);
    }
    union_chain(b, N, merge, sizes, next.back(), fam_.count_only);
    b.call(convert_prog(N, fam_.count_only), {x, s}, true);
    b.call(c, cargs, true);
    if (below) b.call(below, {nu, E.sub(0, eff_width(N, i - 1))}, true);
    ProgramPtr p = b.build();
    naive_.emplace(i, p);
    return p;
}

ProgramPtr SetGenerator::naive() { return naive_step(fam_.r); }

void LevelAudit::attach(Machine& m) {
    m.set_observer([this](const Program& p, bool inverse, bool entering, const Machine& mm) {
        uint32_t i = 0, l = 0;
        std::string name = p.name();
        if (name.size() > 3 && name.ends_with("^-1")) {
            name.resize(name.size() - 3);
            inverse = !inverse;
        }
        if (!parse_block_name(name, i, l)) return;
        if (entering) {
            open_.push_back({LevelEvent{i, l, inverse, 0}, mm.calculate_calls()});
        } else {
            auto [ev, at] = open_.back();
            open_.pop_back();
            ev.calls = mm.calculate_calls() - at;
            done_.push_back(ev);
        }
    });
}

ProgramPtr scripted_oracle(uint32_t N, uint32_t nu_width, uint32_t i, const std::vector<uint32_t>& table) {
    ProgramBuilder b("calc" + std::to_string(i));
    Reg nu = b.param(nu_width);
    block_params(b, N, i - 1);
    Reg x = b.param(bitlen(N));
    for (uint64_t u = 0; u < table.size() && u < (uint64_t(1) << nu_width); ++u)
        circ::xor_const(b, x, table[u], circ::eq_const(nu, u));
    b.set_calculate(true);
    return b.build();
}

OracleFamily scripted_family(uint32_t N, uint32_t r, uint32_t nu_width, std::vector<std::vector<uint32_t>> script) {
    OracleFamily f;
    f.N = N;
    f.r = r;
    f.nu_width = nu_width;
    f.calculate = [N, nu_width, script = std::move(script)](uint32_t i) {
        std::vector<uint32_t> table;
        for (const auto& row : script) table.push_back(row.at(i - 1));
        return scripted_oracle(N, nu_width, i, table);
    };
    return f;
}

}  // namespace hfchc
