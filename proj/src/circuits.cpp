#include "hfchc/circuits.hpp"

#include <mutex>
#include <unordered_map>

namespace hfchc::circ {

std::vector<Cond> eq_const(const Reg& r, uint64_t value) {
    std::vector<Cond> out;
    out.reserve(r.width);
    for (uint32_t k = 0; k < r.width; ++k)
        out.push_back({r[k], static_cast<uint8_t>(k < 64 ? (value >> k) & 1 : 0)});
    return out;
}

std::vector<Cond> join(std::span<const Cond> a, std::span<const Cond> b) {
    std::vector<Cond> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

void mc_perm(ProgramBuilder& b, std::span<const Cond> conds, CellRef target, Perm p) {
    if (conds.size() <= 2) {
        b.perm(target, p, conds);
        return;
    }
    const size_t k = conds.size();
    Reg chain = b.scratch(static_cast<uint32_t>(k - 2));
    b.x(chain[0], {conds[0], conds[1]});
    for (size_t j = 1; j + 2 < k; ++j) b.x(chain[j], {Cond{chain[j - 1], 1}, conds[j + 1]});
    b.perm(target, p, {{Cond{chain[k - 3], 1}, conds[k - 1]}});
    for (size_t j = k - 3; j >= 1; --j) b.x(chain[j], {Cond{chain[j - 1], 1}, conds[j + 1]});
    b.x(chain[0], {conds[0], conds[1]});
    b.release(chain);
}

void mcx(ProgramBuilder& b, std::span<const Cond> conds, CellRef target) { mc_perm(b, conds, target, Perm{1, 0, 2}); }

void mc_inc(ProgramBuilder& b, std::span<const Cond> conds, CellRef target, uint8_t k) {
    const uint8_t r = b.radix_of(target);
    k %= r;
    if (k == 0) return;
    Perm p{0, 1, 2};
    for (uint8_t v = 0; v < r; ++v) p[v] = static_cast<uint8_t>((v + k) % r);
    mc_perm(b, conds, target, p);
}

AndFlag::AndFlag(ProgramBuilder& b, std::span<const Cond> conds) : b_(&b), orig_(conds.begin(), conds.end()) {
    if (orig_.size() <= 2) {
        view_ = orig_;
        return;
    }
    folded_ = true;
    flag_ = b.scratch(1);
    mcx(b, orig_, flag_[0]);
    view_ = {Cond{flag_[0], 1}};
}

void AndFlag::release() {
    if (!live_) return;
    live_ = false;
    if (folded_) {
        mcx(*b_, orig_, flag_[0]);
        b_->release(flag_);
    }
}

AndFlag::~AndFlag() { release(); }

void xor_const(ProgramBuilder& b, const Reg& r, uint64_t value, std::span<const Cond> conds) {
    if (value == 0) return;
    AndFlag f(b, conds);
    for (uint32_t k = 0; k < r.width && k < 64; ++k)
        if ((value >> k) & 1) b.x(r[k], f.conds());
}

void xor_reg(ProgramBuilder& b, const Reg& src, const Reg& dst, std::span<const Cond> conds) {
    AndFlag f(b, conds);
    const uint32_t w = std::min(src.width, dst.width);
    for (uint32_t k = 0; k < w; ++k) {
        std::vector<Cond> c(f.conds().begin(), f.conds().end());
        c.push_back({src[k], 1});
        mcx(b, c, dst[k]);
    }
}

ProgramPtr adder_prog(uint32_t width) {
    static std::mutex mu;
    static std::unordered_map<uint32_t, ProgramPtr> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(width); it != cache.end()) return it->second;

    ProgramBuilder b("add" + std::to_string(width));
    Reg a = b.param(width);
    Reg t = b.param(width);
    Reg c = b.local(1);
    // MAJ(x, y, z) leaves the carry in z; UMA undoes it and leaves the sum in y.
    auto maj = [&](CellRef x, CellRef y, CellRef z) {
        b.x(y, {Cond{z, 1}});
        b.x(x, {Cond{z, 1}});
        b.x(z, {Cond{x, 1}, Cond{y, 1}});
    };
    auto uma = [&](CellRef x, CellRef y, CellRef z) {
        b.x(z, {Cond{x, 1}, Cond{y, 1}});
        b.x(x, {Cond{z, 1}});
        b.x(y, {Cond{x, 1}});
    };
    maj(c[0], t[0], a[0]);
    for (uint32_t i = 1; i < width; ++i) maj(a[i - 1], t[i], a[i]);
    for (uint32_t i = width - 1; i >= 1; --i) uma(a[i - 1], t[i], a[i]);
    uma(c[0], t[0], a[0]);
    b.set_shortcut([width](std::span<const std::span<uint8_t>> ps, bool inv) {
        uint64_t x = 0, y = 0;
        for (uint32_t k = 0; k < width; ++k) {
            x |= uint64_t(ps[0][k]) << k;
            y |= uint64_t(ps[1][k]) << k;
        }
        y = inv ? y - x : y + x;
        for (uint32_t k = 0; k < width; ++k) ps[1][k] = (y >> k) & 1;
    });
    ProgramPtr p = b.build();
    cache.emplace(width, p);
    return p;
}

namespace {

// Runs `body(a')` with a' an alias of `a` widened to `w` bits.
template <class F>
void widened(ProgramBuilder& b, const Reg& a, uint32_t w, F&& body) {
    if (a.width == w) {
        body(a);
        return;
    }
    Reg ext = b.scratch(w);
    xor_reg(b, a, ext);
    body(ext);
    xor_reg(b, a, ext);
    b.release(ext);
}

}  // namespace

void add(ProgramBuilder& b, const Reg& a, const Reg& t) {
    widened(b, a, t.width, [&](const Reg& x) { b.call(adder_prog(t.width), {x, t}); });
}

void sub(ProgramBuilder& b, const Reg& a, const Reg& t) {
    widened(b, a, t.width, [&](const Reg& x) { b.call(adder_prog(t.width), {x, t}, true); });
}

void add_const(ProgramBuilder& b, const Reg& t, uint64_t c, std::span<const Cond> conds) {
    if (t.width < 64) c &= (uint64_t(1) << t.width) - 1;
    if (c == 0) return;
    Reg s = b.scratch(t.width);
    xor_const(b, s, c, conds);
    b.call(adder_prog(t.width), {s, t});
    xor_const(b, s, c, conds);
    b.release(s);
}

void sub_const(ProgramBuilder& b, const Reg& t, uint64_t c, std::span<const Cond> conds) {
    if (t.width < 64) c &= (uint64_t(1) << t.width) - 1;
    if (c == 0) return;
    Reg s = b.scratch(t.width);
    xor_const(b, s, c, conds);
    b.call(adder_prog(t.width), {s, t}, true);
    xor_const(b, s, c, conds);
    b.release(s);
}

void flip_if_equal(ProgramBuilder& b, const Reg& x, const Reg& y, CellRef out, std::span<const Cond> conds) {
    xor_reg(b, x, y);
    mcx(b, join(conds, eq_const(y, 0)), out);
    xor_reg(b, x, y);
}

void add_trits(ProgramBuilder& b, const Reg& src, const Reg& dst, uint8_t sign) {
    for (uint32_t k = 0; k < src.width; ++k) {
        b.inc(dst[k], static_cast<uint8_t>(sign % 3), {Cond{src[k], 1}});
        b.inc(dst[k], static_cast<uint8_t>((2 * sign) % 3), {Cond{src[k], 2}});
    }
}

}  // namespace hfchc::circ
