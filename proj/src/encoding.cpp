#include "hfchc/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <tuple>

#include "hfchc/circuits.hpp"

namespace hfchc {

const EncodingConstants& encoding_constants() {
    // Measured from the count-only builds: the per-bit cost of the nested
    // scans dominates union for small K, the merged register for large K.
    static const EncodingConstants c{8.0, 24.0, 4.0, 6.0};
    return c;
}

uint32_t bitlen(uint64_t v) {
    uint32_t n = 0;
    while (v) {
        ++n;
        v >>= 1;
    }
    return n;
}

uint32_t capacity(uint32_t N, uint32_t k) {
    if (k == 0 || k > N) throw InvalidK("capacity: need 1 <= k <= N");
    long double v = (long double)k * std::log2((long double)(N + k) / (long double)k);
    return static_cast<uint32_t>(std::floor(v + 1e-12L)) + 2 * k;
}

uint64_t eff_bound(uint32_t N, uint32_t k) {
    if (k == 0 || k > N) throw InvalidK("eff_bound: need 1 <= k <= N");
    long double v = 2.0L * k * std::log2((long double)(N + k) / (long double)k);
    return static_cast<uint64_t>(std::floor(v + 1e-12L)) + 8ull * k;
}

TritString encode_basic(uint32_t N, std::vector<uint32_t> S) {
    if (S.empty()) throw EmptySet("encode_basic: empty set");
    std::sort(S.begin(), S.end());
    for (size_t j = 0; j < S.size(); ++j) {
        if (S[j] < 1 || S[j] > N) throw ElementOutOfRange("encode_basic: element " + std::to_string(S[j]));
        if (j > 0 && S[j] == S[j - 1]) throw DuplicateElement("encode_basic: element " + std::to_string(S[j]));
    }
    const uint32_t cap = capacity(N, static_cast<uint32_t>(S.size()));
    TritString t;
    t.reserve(cap);
    uint32_t prev = 0;
    for (uint32_t y : S) {
        uint32_t d = y - prev;
        for (int bit = int(bitlen(d)) - 1; bit >= 0; --bit) t.push_back((d >> bit) & 1);
        t.push_back(2);
        prev = y;
    }
    if (t.size() > cap) throw std::logic_error("encode_basic: capacity bound violated");
    t.resize(cap, 0);
    return t;
}

std::vector<uint32_t> decode_basic(uint32_t N, uint32_t k, const TritString& t) {
    if (t.size() != capacity(N, k)) throw MalformedEncoding("decode_basic: wrong length");
    std::vector<uint32_t> out;
    uint64_t prev = 0, cur = 0;
    size_t p = 0, start = 0;
    while (out.size() < k) {
        if (p >= t.size()) throw MalformedEncoding("decode_basic: fewer than k blocks");
        uint8_t c = t[p];
        if (c > 2) throw MalformedEncoding("decode_basic: cell out of range");
        if (c == 2) {
            if (p == start) throw MalformedEncoding("decode_basic: empty block");
            prev += cur;
            if (prev > N) throw MalformedEncoding("decode_basic: element exceeds N");
            out.push_back(static_cast<uint32_t>(prev));
            cur = 0;
            start = p + 1;
        } else {
            if (p == start && c == 0) throw MalformedEncoding("decode_basic: leading zero");
            cur = cur * 2 + c;
            if (cur > N) throw MalformedEncoding("decode_basic: block exceeds N");
        }
        ++p;
    }
    for (; p < t.size(); ++p)
        if (t[p] != 0) throw MalformedEncoding("decode_basic: nonzero padding or missing separator");
    return out;
}

std::string to_string(const TritString& t) {
    std::string s;
    s.reserve(t.size());
    for (uint8_t c : t) s.push_back(static_cast<char>('0' + c));
    return s;
}

TritString trits_from_string(std::string_view s) {
    TritString t;
    t.reserve(s.size());
    for (char c : s) {
        if (c < '0' || c > '2') throw MalformedEncoding("trit string: bad character");
        t.push_back(static_cast<uint8_t>(c - '0'));
    }
    return t;
}

std::vector<uint32_t> eff_block_sizes(uint32_t k) {
    std::vector<uint32_t> sizes;
    for (int bit = 31; bit >= 0; --bit)
        if ((k >> bit) & 1) sizes.push_back(1u << bit);
    return sizes;
}

uint32_t eff_width(uint32_t N, uint32_t k) {
    uint32_t w = 0;
    for (uint32_t s : eff_block_sizes(k)) w += capacity(N, s);
    return w;
}

uint32_t EffEncoding::total_trits() const {
    uint32_t w = 0;
    for (const auto& b : blocks) w += static_cast<uint32_t>(b.size());
    return w;
}

TritString EffEncoding::flat() const {
    TritString t;
    for (const auto& b : blocks) t.insert(t.end(), b.begin(), b.end());
    return t;
}

EffEncoding encode_eff(uint32_t N, const std::vector<uint32_t>& Z) {
    if (Z.empty()) throw EmptySet("encode_eff: empty sequence");
    std::set<uint32_t> seen;
    for (uint32_t z : Z) {
        if (z < 1 || z > N) throw ElementOutOfRange("encode_eff: element " + std::to_string(z));
        if (!seen.insert(z).second) throw DuplicateElement("encode_eff: element " + std::to_string(z));
    }
    EffEncoding e;
    e.N = N;
    e.sizes = eff_block_sizes(static_cast<uint32_t>(Z.size()));
    size_t at = 0;
    for (uint32_t s : e.sizes) {
        e.blocks.push_back(encode_basic(N, std::vector<uint32_t>(Z.begin() + at, Z.begin() + at + s)));
        at += s;
    }
    return e;
}

std::vector<uint32_t> decode_eff(uint32_t N, uint32_t k, const TritString& flat) {
    std::vector<uint32_t> out;
    size_t at = 0;
    for (uint32_t s : eff_block_sizes(k)) {
        uint32_t c = capacity(N, s);
        if (at + c > flat.size()) throw MalformedEncoding("decode_eff: too short");
        auto part = decode_basic(N, s, TritString(flat.begin() + at, flat.begin() + at + c));
        out.insert(out.end(), part.begin(), part.end());
        at += c;
    }
    if (at != flat.size()) throw MalformedEncoding("decode_eff: trailing cells");
    return out;
}

// ------------------------------------------------------------ scan models

namespace {

// Delta value and digit count of the block ending at separator p.
std::pair<uint64_t, uint32_t> block_before(std::span<const uint8_t> enc, size_t p, uint32_t w) {
    uint64_t d = 0;
    uint32_t len = 0;
    for (uint32_t o = 1; o <= w && o <= p; ++o) {
        uint8_t c = enc[p - o];
        if (c == 2) break;
        if (c == 1) d |= uint64_t(1) << (o - 1);
        len = o;
    }
    return {d, len};
}

uint64_t mask(uint32_t w) { return w >= 64 ? ~uint64_t(0) : (uint64_t(1) << w) - 1; }

}  // namespace

bool scan_contains(std::span<const uint8_t> enc, uint32_t w, uint64_t x) {
    uint64_t y = 0;
    bool found = false;
    for (size_t p = 0; p < enc.size(); ++p) {
        if (enc[p] != 2) continue;
        y = (y + block_before(enc, p, w).first) & mask(w);
        if (y == x) found = !found;
    }
    return found;
}

std::pair<uint64_t, uint64_t> scan_totals(std::span<const uint8_t> enc, uint32_t w) {
    uint64_t y = 0, used = 0;
    for (size_t p = 0; p < enc.size(); ++p) {
        if (enc[p] != 2) continue;
        auto [d, len] = block_before(enc, p, w);
        y = (y + d) & mask(w);
        used += 1 + len;
    }
    return {y, used};
}

// ------------------------------------------------------------- programs

namespace {

std::recursive_mutex cache_mu;

template <class Key, class Make>
ProgramPtr memo(std::map<Key, ProgramPtr>& cache, const Key& key, Make&& make) {
    std::lock_guard<std::recursive_mutex> lock(cache_mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    ProgramPtr p = make();
    cache.emplace(key, p);
    return p;
}

uint64_t read_bits(std::span<const uint8_t> r) {
    uint64_t v = 0;
    for (size_t k = 0; k < r.size() && k < 64; ++k) v |= uint64_t(r[k]) << k;
    return v;
}

void write_bits(std::span<uint8_t> r, uint64_t v) {
    for (size_t k = 0; k < r.size(); ++k) r[k] = k < 64 ? (v >> k) & 1 : 0;
}

// r[0] ^= [enc[p] == 2] (under `gate`), r[o] ^= r[o-1] ∧ [enc[p-o] != 2].
// Self-inverse when replayed in reverse order by unchain().
void chain(ProgramBuilder& b, const Reg& enc, uint32_t p, uint32_t lim, const Reg& r, std::span<const Cond> gate) {
    circ::mcx(b, circ::join(gate, std::vector<Cond>{{enc[p], 2}}), r[0]);
    for (uint32_t o = 1; o <= lim; ++o) {
        b.x(r[o], {Cond{r[o - 1], 1}, Cond{enc[p - o], 0}});
        b.x(r[o], {Cond{r[o - 1], 1}, Cond{enc[p - o], 1}});
    }
}

void unchain(ProgramBuilder& b, const Reg& enc, uint32_t p, uint32_t lim, const Reg& r, std::span<const Cond> gate) {
    for (uint32_t o = lim; o >= 1; --o) {
        b.x(r[o], {Cond{r[o - 1], 1}, Cond{enc[p - o], 1}});
        b.x(r[o], {Cond{r[o - 1], 1}, Cond{enc[p - o], 0}});
    }
    circ::mcx(b, circ::join(gate, std::vector<Cond>{{enc[p], 2}}), r[0]);
}

// d[o-1] ^= r[o] ∧ [enc[p-o] == 1]: the delta of the block ending at p.
void digits(ProgramBuilder& b, const Reg& enc, uint32_t p, uint32_t lim, const Reg& r, const Reg& d) {
    for (uint32_t o = 1; o <= lim; ++o) b.x(d[o - 1], {Cond{r[o], 1}, Cond{enc[p - o], 1}});
}

// Scan body shared by Contains: params (enc, x, found, y). Leaves y holding
// the final prefix sum, which the caller removes by running the inverse.
ProgramPtr contains_scan(uint32_t N, uint32_t cap, bool count_only) {
    static std::map<std::tuple<uint32_t, uint32_t, bool>, ProgramPtr> cache;
    return memo(cache, std::make_tuple(N, cap, count_only), [&] {
        const uint32_t w = bitlen(N);
        ProgramBuilder b("contains_scan", count_only);
        Reg enc = b.param(cap, 3), x = b.param(w), found = b.param(1), y = b.param(w);
        Reg r = b.local(w + 1), d = b.local(w);
        for (uint32_t p = 0; p < cap; ++p) {
            const uint32_t lim = std::min(w, p);
            chain(b, enc, p, lim, r, {});
            digits(b, enc, p, lim, r, d);
            circ::add(b, d, y);
            std::vector<Cond> sep{{r[0], 1}};
            circ::flip_if_equal(b, x, y, found[0], sep);
            digits(b, enc, p, lim, r, d);
            unchain(b, enc, p, lim, r, {});
        }
        return b.build();
    });
}

}  // namespace

ProgramPtr contains_prog(uint32_t N, uint32_t k, bool count_only) {
    if (k == 0 || k > N) throw InvalidK("contains_prog: need 1 <= k <= N");
    static std::map<std::tuple<uint32_t, uint32_t, bool>, ProgramPtr> cache;
    return memo(cache, std::make_tuple(N, k, count_only), [&] {
        const uint32_t w = bitlen(N), cap = capacity(N, k);
        ProgramBuilder b("contains", count_only);
        Reg enc = b.param(cap, 3), x = b.param(w), out = b.param(1);
        Reg found = b.local(1), y = b.local(w);
        ProgramPtr scan = contains_scan(N, cap, count_only);
        b.call(scan, {enc, x, found, y});
        b.x(out[0], {Cond{found[0], 1}});
        b.call(scan, {enc, x, found, y}, true);
        b.set_shortcut([w](std::span<const std::span<uint8_t>> ps, bool) {
            if (scan_contains(ps[0], w, read_bits(ps[1]))) ps[2][0] ^= 1;
        });
        return b.build();
    });
}

ProgramPtr convert_prog(uint32_t N, bool count_only) {
    static std::map<std::tuple<uint32_t, bool>, ProgramPtr> cache;
    return memo(cache, std::make_tuple(N, count_only), [&] {
        const uint32_t w = bitlen(N), cap = capacity(N, 1);
        ProgramBuilder b("convert", count_only);
        Reg x = b.param(w), out = b.param(cap, 3);
        for (uint32_t L = 1; L <= w; ++L) {
            // x has exactly L significant bits.
            std::vector<Cond> conds{{x[L - 1], 1}};
            for (uint32_t j = L; j < w; ++j) conds.push_back({x[j], 0});
            circ::AndFlag f(b, conds);
            for (uint32_t o = 0; o < L; ++o)
                circ::mc_inc(b, circ::join(f.conds(), std::vector<Cond>{{x[L - 1 - o], 1}}), out[o], 1);
            circ::mc_inc(b, f.conds(), out[L], 2);
        }
        b.set_shortcut([w](std::span<const std::span<uint8_t>> ps, bool inv) {
            uint64_t v = read_bits(ps[0]);
            uint32_t L = bitlen(v);
            if (L == 0 || L > w) return;
            auto bump = [&](size_t pos, uint8_t k) { ps[1][pos] = uint8_t((ps[1][pos] + (inv ? 3 - k : k)) % 3); };
            for (uint32_t o = 0; o < L; ++o)
                if ((v >> (L - 1 - o)) & 1) bump(o, 1);
            bump(L, 2);
        });
        return b.build();
    });
}

ProgramPtr scan_prog(uint32_t N, uint32_t cap, bool count_only) {
    static std::map<std::tuple<uint32_t, uint32_t, bool>, ProgramPtr> cache;
    return memo(cache, std::make_tuple(N, cap, count_only), [&] {
        const uint32_t w = bitlen(N), wc = bitlen(cap);
        ProgramBuilder b("scan", count_only);
        Reg enc = b.param(cap, 3), y = b.param(w), used = b.param(wc);
        Reg r = b.local(w + 1), d = b.local(w), ell = b.local(bitlen(w));
        auto lengths = [&](uint32_t lim) {
            for (uint32_t o = 1; o <= lim; ++o) {
                std::vector<Cond> c{{r[o], 1}};
                if (o < lim) c.push_back({r[o + 1], 0});
                for (uint32_t j = 0; j < ell.width; ++j)
                    if ((o >> j) & 1) b.x(ell[j], c);
            }
        };
        for (uint32_t p = 0; p < cap; ++p) {
            const uint32_t lim = std::min(w, p);
            chain(b, enc, p, lim, r, {});
            digits(b, enc, p, lim, r, d);
            circ::add(b, d, y);
            lengths(lim);
            circ::add(b, ell, used);
            std::vector<Cond> sep{{r[0], 1}};
            circ::add_const(b, used, 1, sep);
            lengths(lim);
            digits(b, enc, p, lim, r, d);
            unchain(b, enc, p, lim, r, {});
        }
        b.set_shortcut([w, wc](std::span<const std::span<uint8_t>> ps, bool inv) {
            auto [ys, us] = scan_totals(ps[0], w);
            uint64_t y = read_bits(ps[1]), u = read_bits(ps[2]);
            write_bits(ps[1], (inv ? y - ys : y + ys) & mask(w));
            write_bits(ps[2], (inv ? u - us : u + us) & mask(wc));
        });
        return b.build();
    });
}

namespace {

// One merge step: with v loaded in xv, appends the delta block of v to T if v
// belongs to exactly one input. Params (enc1, enc2, T, xv).
ProgramPtr union_step(uint32_t N, uint32_t k1, uint32_t k2, bool count_only) {
    static std::map<std::tuple<uint32_t, uint32_t, uint32_t, bool>, ProgramPtr> cache;
    return memo(cache, std::make_tuple(N, k1, k2, count_only), [&] {
        const uint32_t w = bitlen(N), cap = capacity(N, k1 + k2), wc = bitlen(cap);
        ProgramBuilder b("union_step", count_only);
        Reg e1 = b.param(capacity(N, k1), 3), e2 = b.param(capacity(N, k2), 3);
        Reg T = b.param(cap, 3), xv = b.param(w);
        Reg bit = b.local(1), Y = b.local(w), Cc = b.local(wc), D = b.local(w), P = b.local(wc);
        Reg len = b.local(w), M = b.local(w), r = b.local(w + 1), q = b.local(1);
        ProgramPtr c1 = contains_prog(N, k1, count_only), c2 = contains_prog(N, k2, count_only);
        ProgramPtr scan = scan_prog(N, cap, count_only);
        const std::vector<Cond> when_b{{bit[0], 1}};

        auto masked = [&](const Reg& src) {
            for (uint32_t j = 0; j < w; ++j) b.x(M[j], {Cond{src[j], 1}, Cond{bit[0], 1}});
        };
        auto onehot_len = [&] {
            for (uint32_t L = 1; L <= w; ++L) {
                std::vector<Cond> c{{D[L - 1], 1}};
                for (uint32_t j = L; j < w; ++j) c.push_back({D[j], 0});
                circ::mcx(b, c, len[L - 1]);
            }
        };

        // b = [v in S1] xor [v in S2]; disjoint inputs make this an OR.
        b.call(c1, {e1, xv, bit});
        b.call(c2, {e2, xv, bit});
        // D = b ? v - Y : 0 and P = used length of T.
        b.call(scan, {T, Y, Cc});
        masked(Y);
        circ::sub(b, M, D);
        masked(Y);
        masked(xv);
        circ::add(b, M, D);
        masked(xv);
        circ::xor_reg(b, Cc, P);
        b.call(scan, {T, Y, Cc}, true);
        onehot_len();
        // Write bin(D) followed by a separator at position P.
        for (uint32_t p = 0; p < cap; ++p) {
            circ::AndFlag at(b, circ::eq_const(P, p));
            for (uint32_t L = 1; L <= w && p + L < cap; ++L) {
                auto qc = circ::join(at.conds(), std::vector<Cond>{{len[L - 1], 1}});
                circ::mcx(b, qc, q[0]);
                for (uint32_t o = 0; o < L; ++o) b.inc(T[p + o], 1, {Cond{q[0], 1}, Cond{D[L - 1 - o], 1}});
                b.inc(T[p + L], 2, {Cond{q[0], 1}});
                circ::mcx(b, qc, q[0]);
            }
        }
        for (uint32_t L = 1; L <= w; ++L) {
            std::vector<Cond> c{{len[L - 1], 1}};
            circ::add_const(b, P, L + 1, c);
        }
        onehot_len();
        // P now marks the end of the new block; read its digits back out of D.
        for (uint32_t p = 1; p <= cap && p < (1u << wc); ++p) {
            const uint32_t s = p - 1, lim = std::min(w, s);
            circ::AndFlag at(b, circ::join(circ::eq_const(P, p), when_b));
            chain(b, T, s, lim, r, at.conds());
            digits(b, T, s, lim, r, D);
            unchain(b, T, s, lim, r, at.conds());
        }
        b.call(scan, {T, Y, Cc});
        circ::xor_reg(b, Cc, P);
        b.call(scan, {T, Y, Cc}, true);
        b.call(c2, {e2, xv, bit});
        b.call(c1, {e1, xv, bit});
        return b.build();
    });
}

}  // namespace

ProgramPtr union_prog(uint32_t N, uint32_t k1, uint32_t k2, bool count_only) {
    if (k1 == 0 || k2 == 0 || k1 + k2 > N) throw InvalidK("union_prog: need k1, k2 >= 1 and k1 + k2 <= N");
    static std::map<std::tuple<uint32_t, uint32_t, uint32_t, bool>, ProgramPtr> cache;
    return memo(cache, std::make_tuple(N, k1, k2, count_only), [&] {
        const uint32_t w = bitlen(N), cap = capacity(N, k1 + k2);
        ProgramBuilder b("union", count_only);
        Reg e1 = b.param(capacity(N, k1), 3), e2 = b.param(capacity(N, k2), 3), out = b.param(cap, 3);
        Reg T = b.local(cap, 3), xv = b.local(w);
        ProgramPtr step = union_step(N, k1, k2, count_only);
        for (uint32_t v = 1; v <= N; ++v) {
            circ::xor_const(b, xv, v);
            b.call(step, {e1, e2, T, xv});
            circ::xor_const(b, xv, v);
        }
        circ::add_trits(b, T, out);
        for (uint32_t v = N; v >= 1; --v) {
            circ::xor_const(b, xv, v);
            b.call(step, {e1, e2, T, xv}, true);
            circ::xor_const(b, xv, v);
        }
        b.set_shortcut([N, w, cap](std::span<const std::span<uint8_t>> ps, bool inv) {
            TritString T(cap, 0);
            uint64_t Y = 0, used = 0;
            for (uint32_t v = 1; v <= N; ++v) {
                if (scan_contains(ps[0], w, v) == scan_contains(ps[1], w, v)) continue;
                uint64_t D = (v - Y) & mask(w);
                uint32_t L = bitlen(D);
                if (used + L < cap && L > 0) {
                    for (uint32_t o = 0; o < L; ++o) T[used + o] = (D >> (L - 1 - o)) & 1;
                    T[used + L] = 2;
                }
                used += L + 1;
                Y = v;
            }
            for (uint32_t j = 0; j < cap; ++j) ps[2][j] = uint8_t((ps[2][j] + (inv ? 3 - T[j] : T[j])) % 3);
        });
        return b.build();
    });
}

ProgramPtr eff_contains_prog(uint32_t N, uint32_t k, bool count_only) {
    if (k > N) throw InvalidK("eff_contains_prog: k exceeds N");
    static std::map<std::tuple<uint32_t, uint32_t, bool>, ProgramPtr> cache;
    return memo(cache, std::make_tuple(N, k, count_only), [&] {
        const uint32_t w = bitlen(N);
        ProgramBuilder b("eff_contains", count_only);
        std::vector<Reg> blocks;
        for (uint32_t s : eff_block_sizes(k)) blocks.push_back(b.param(capacity(N, s), 3));
        Reg x = b.param(w), out = b.param(1);
        // Elements are distinct across blocks, so xor-ing the block answers is an OR.
        auto sizes = eff_block_sizes(k);
        for (size_t j = 0; j < blocks.size(); ++j) b.call(contains_prog(N, sizes[j], count_only), {blocks[j], x, out});
        const size_t nb = blocks.size();
        b.set_shortcut([w, nb](std::span<const std::span<uint8_t>> ps, bool) {
            const uint64_t xv = read_bits(ps[nb]);
            bool hit = false;
            for (size_t j = 0; j < nb; ++j) hit ^= scan_contains(ps[j], w, xv);
            if (hit) ps[nb + 1][0] ^= 1;
        });
        return b.build();
    });
}

}  // namespace hfchc
