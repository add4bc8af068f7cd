#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hfchc/encoding.hpp"

using namespace hfchc;

namespace {

Machine expanded() { return Machine(Machine::Options{.use_shortcuts = false}); }

std::vector<uint32_t> subset(uint32_t mask) {
    std::vector<uint32_t> s;
    for (uint32_t j = 0; j < 32; ++j)
        if ((mask >> j) & 1) s.push_back(j + 1);
    return s;
}

// Longest raw encoding of any k-subset of [1, N]: maximize the sum of
// (bitlen(delta) + 1) over k positive deltas with total at most N.
uint32_t max_raw_length(uint32_t N, uint32_t k) {
    std::vector<std::vector<int>> best(k + 1, std::vector<int>(N + 1, -1));
    best[0][0] = 0;
    for (uint32_t j = 1; j <= k; ++j)
        for (uint32_t s = 0; s <= N; ++s)
            for (uint32_t d = 1; d <= s; ++d)
                if (best[j - 1][s - d] >= 0)
                    best[j][s] = std::max(best[j][s], best[j - 1][s - d] + int(bitlen(d)) + 1);
    return uint32_t(*std::max_element(best[k].begin(), best[k].end()));
}

bool run_contains(Machine& m, const ProgramPtr& p, const TritString& enc, uint32_t x) {
    auto re = m.alloc(uint32_t(enc.size()), 3, RegKind::Input);
    auto rx = m.alloc(p->params()[1].width, 2, RegKind::Input);
    auto ro = m.alloc(1, 2, RegKind::Output);
    m.write(re, enc);
    m.write_uint(rx, x);
    m.run(*p, {re, rx, ro});
    bool out = m.read_uint(ro);
    EXPECT_EQ(m.read(re), enc);
    EXPECT_EQ(m.read_uint(rx), x);
    m.free(ro);
    m.free(rx);
    m.free(re);
    return out;
}

TritString run_union(Machine& m, uint32_t N, const std::vector<uint32_t>& s1, const std::vector<uint32_t>& s2) {
    auto p = union_prog(N, uint32_t(s1.size()), uint32_t(s2.size()));
    auto e1 = encode_basic(N, s1), e2 = encode_basic(N, s2);
    auto r1 = m.alloc(uint32_t(e1.size()), 3, RegKind::Input);
    auto r2 = m.alloc(uint32_t(e2.size()), 3, RegKind::Input);
    auto ro = m.alloc(p->params()[2].width, 3, RegKind::Output);
    m.write(r1, e1);
    m.write(r2, e2);
    auto before = m.snapshot();
    m.run(*p, {r1, r2, ro});
    TritString out = m.read(ro);
    m.run(*p, {r1, r2, ro}, true);
    EXPECT_EQ(m.snapshot(), before);
    return out;
}

}  // namespace

TEST(Basic, WorkedExampleString) {
    EXPECT_EQ(capacity(20, 5), 21u);
    EXPECT_EQ(to_string(encode_basic(20, {6, 7, 10, 15, 17})), "110212112101210200000");
    EXPECT_EQ(decode_basic(20, 5, trits_from_string("110212112101210200000")),
              (std::vector<uint32_t>{6, 7, 10, 15, 17}));
}

TEST(Basic, SmallCases) {
    EXPECT_EQ(capacity(1, 1), 3u);
    EXPECT_EQ(to_string(encode_basic(1, {1})), "120");
    EXPECT_EQ(capacity(8, 2), 8u);
    EXPECT_EQ(to_string(encode_basic(8, {3, 5})), "11210200");
    EXPECT_EQ(to_string(encode_basic(8, {5, 3})), "11210200");
}

TEST(Basic, Errors) {
    EXPECT_THROW(encode_basic(5, {}), EmptySet);
    EXPECT_THROW(encode_basic(5, {0}), ElementOutOfRange);
    EXPECT_THROW(encode_basic(5, {6}), ElementOutOfRange);
    EXPECT_THROW(encode_basic(5, {2, 2}), DuplicateElement);
    EXPECT_THROW(decode_basic(8, 2, trits_from_string("01210200")), MalformedEncoding);
    EXPECT_THROW(decode_basic(8, 2, trits_from_string("11200000")), MalformedEncoding);
    EXPECT_THROW(decode_basic(8, 2, trits_from_string("11211000")), MalformedEncoding);
    EXPECT_THROW(decode_basic(8, 2, trits_from_string("2120000")), MalformedEncoding);
    EXPECT_THROW(decode_basic(8, 2, trits_from_string("11210201")), MalformedEncoding);
}

TEST(Basic, SingletonRoundTrip) {
    for (uint32_t N = 1; N <= 64; ++N)
        for (uint32_t x = 1; x <= N; ++x) EXPECT_EQ(decode_basic(N, 1, encode_basic(N, {x})), std::vector<uint32_t>{x});
}

TEST(Basic, ExhaustiveRoundTripUpTo16) {
    for (uint32_t N = 1; N <= 16; ++N)
        for (uint32_t mask = 1; mask < (1u << N); ++mask) {
            auto S = subset(mask);
            ASSERT_EQ(decode_basic(N, uint32_t(S.size()), encode_basic(N, S)), S) << "N=" << N << " mask=" << mask;
        }
}

TEST(Basic, RandomRoundTripLargeN) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        uint32_t N = std::uniform_int_distribution<uint32_t>(1, 10000)(rng);
        uint32_t k = std::uniform_int_distribution<uint32_t>(1, std::min<uint32_t>(N, 300))(rng);
        std::vector<uint32_t> all(N);
        std::iota(all.begin(), all.end(), 1);
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<uint32_t> S(all.begin(), all.begin() + k);
        std::sort(S.begin(), S.end());
        EXPECT_EQ(decode_basic(N, k, encode_basic(N, S)), S);
    }
}

TEST(Basic, CapacityCoversLongestEncoding) {
    for (uint32_t N = 1; N <= 32; ++N)
        for (uint32_t k = 1; k <= N; ++k) EXPECT_LE(max_raw_length(N, k), capacity(N, k)) << N << "," << k;
}

TEST(Basic, PaddingExtension) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 300; ++trial) {
        uint32_t N = std::uniform_int_distribution<uint32_t>(1, 40)(rng);
        uint32_t N2 = N + std::uniform_int_distribution<uint32_t>(1, 40)(rng);
        auto S = subset(uint32_t(rng()) & ((1u << std::min<uint32_t>(N, 31)) - 1));
        if (S.empty()) continue;
        auto a = encode_basic(N, S), b = encode_basic(N2, S);
        ASSERT_GE(b.size(), a.size());
        EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
        EXPECT_TRUE(std::all_of(b.begin() + a.size(), b.end(), [](uint8_t c) { return c == 0; }));
    }
}

TEST(Eff, BlockSizesFollowBinaryExpansion) {
    EXPECT_EQ(eff_block_sizes(13), (std::vector<uint32_t>{8, 4, 1}));
    EXPECT_EQ(eff_block_sizes(1), (std::vector<uint32_t>{1}));
    std::vector<uint32_t> Z{5, 9, 1, 13, 2, 7, 20, 11, 3, 17, 4, 6, 19};
    auto e = encode_eff(20, Z);
    ASSERT_EQ(e.blocks.size(), 3u);
    EXPECT_EQ(e.blocks[1], encode_basic(20, {3, 17, 4, 6}));
    EXPECT_EQ(e.blocks[2], encode_basic(20, {19}));
    EXPECT_EQ(encode_eff(9, {4}).blocks[0], encode_basic(9, {4}));
    EXPECT_THROW(encode_eff(9, {4, 4}), DuplicateElement);
}

TEST(Eff, SizeBoundAllKUpTo64) {
    for (uint32_t N = 1; N <= 64; ++N)
        for (uint32_t k = 1; k <= N; ++k) {
            EXPECT_LE(eff_width(N, k), eff_bound(N, k)) << N << "," << k;
        }
}

TEST(Contains, WorkedExampleMembership) {
    Machine m = expanded();
    auto p = contains_prog(20, 5);
    auto enc = encode_basic(20, {6, 7, 10, 15, 17});
    EXPECT_TRUE(run_contains(m, p, enc, 10));
    EXPECT_FALSE(run_contains(m, p, enc, 11));
    EXPECT_THROW(contains_prog(4, 5), InvalidK);
}

TEST(Contains, ExhaustiveAgainstMembershipN12) {
    const uint32_t N = 12;
    std::vector<ProgramPtr> progs;
    for (uint32_t k = 1; k <= N; ++k) progs.push_back(contains_prog(N, k));
    Machine m = expanded();
    for (uint32_t mask = 1; mask < (1u << N); ++mask) {
        auto S = subset(mask);
        auto enc = encode_basic(N, S);
        for (uint32_t x = 1; x <= N; ++x)
            ASSERT_EQ(run_contains(m, progs[S.size() - 1], enc, x), bool((mask >> (x - 1)) & 1))
                << "mask=" << mask << " x=" << x;
    }
    EXPECT_EQ(m.live_width(), 0u);
}

TEST(Contains, ShortcutMatchesExpansionOnArbitraryCells) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        uint32_t N = std::uniform_int_distribution<uint32_t>(1, 30)(rng);
        uint32_t k = std::uniform_int_distribution<uint32_t>(1, N)(rng);
        auto p = contains_prog(N, k);
        TritString enc(capacity(N, k));
        for (auto& c : enc) c = uint8_t(rng() % 3);
        uint32_t x = uint32_t(rng() % (1u << bitlen(N)));
        Machine a = expanded(), b;
        EXPECT_EQ(run_contains(a, p, enc, x), run_contains(b, p, enc, x));
        EXPECT_EQ(a.gate_count(), b.gate_count());
    }
}

TEST(Convert, ExhaustiveUpTo32) {
    for (uint32_t N = 1; N <= 32; ++N) {
        auto p = convert_prog(N);
        for (uint32_t x = 1; x <= N; ++x) {
            for (bool sc : {false, true}) {
                Machine m(Machine::Options{.use_shortcuts = sc});
                auto rx = m.alloc(bitlen(N), 2, RegKind::Input);
                auto ro = m.alloc(capacity(N, 1), 3, RegKind::Output);
                m.write_uint(rx, x);
                m.run(*p, {rx, ro});
                ASSERT_EQ(m.read(ro), encode_basic(N, {x})) << N << "," << x;
                ASSERT_EQ(decode_basic(N, 1, m.read(ro)), std::vector<uint32_t>{x});
                m.run(*p, {rx, ro}, true);
                EXPECT_EQ(m.read(ro), TritString(capacity(N, 1), 0));
            }
        }
    }
    Machine m = expanded();
    auto rx = m.alloc(1, 2, RegKind::Input);
    auto ro = m.alloc(3, 3, RegKind::Output);
    m.write_uint(rx, 1);
    m.run(*convert_prog(1), {rx, ro});
    EXPECT_EQ(to_string(m.read(ro)), "120");
}

TEST(Scan, ShortcutMatchesExpansionOnArbitraryCells) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        uint32_t N = std::uniform_int_distribution<uint32_t>(1, 40)(rng);
        uint32_t cap = std::uniform_int_distribution<uint32_t>(3, 40)(rng);
        auto p = scan_prog(N, cap);
        TritString enc(cap);
        for (auto& c : enc) c = uint8_t(rng() % 3);
        const uint64_t y0 = rng() % (1u << bitlen(N));
        std::vector<uint8_t> got[2];
        for (int sc = 0; sc < 2; ++sc) {
            Machine m(Machine::Options{.use_shortcuts = sc == 1});
            auto re = m.alloc(cap, 3, RegKind::Input);
            auto ry = m.alloc(bitlen(N), 2, RegKind::Output);
            auto ru = m.alloc(bitlen(cap), 2, RegKind::Output);
            m.write(re, enc);
            m.write_uint(ry, y0);
            m.run(*p, {re, ry, ru});
            got[sc] = m.snapshot();
        }
        EXPECT_EQ(got[0], got[1]);
    }
}

TEST(Union, WorkedExampleComposition) {
    Machine m = expanded();
    EXPECT_EQ(to_string(run_union(m, 20, {6, 7}, {10, 15, 17})), "110212112101210200000");
}

TEST(Union, SmallCases) {
    Machine m = expanded();
    EXPECT_EQ(run_union(m, 4, {1}, {2}), encode_basic(4, {1, 2}));
    EXPECT_EQ(run_union(m, 8, {1, 3, 5}, {2, 4, 6}), encode_basic(8, {1, 2, 3, 4, 5, 6}));
    EXPECT_EQ(run_union(m, 8, {8}, {1}), encode_basic(8, {1, 8}));
    EXPECT_EQ(m.live_width(), 0u);
}

TEST(Union, RandomDisjointPairsExpandedAndShortcut) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 120; ++trial) {
        uint32_t N = std::uniform_int_distribution<uint32_t>(2, 14)(rng);
        std::vector<uint32_t> all(N);
        std::iota(all.begin(), all.end(), 1);
        std::shuffle(all.begin(), all.end(), rng);
        uint32_t K = std::uniform_int_distribution<uint32_t>(2, N)(rng);
        uint32_t k1 = std::uniform_int_distribution<uint32_t>(1, K - 1)(rng);
        std::vector<uint32_t> s1(all.begin(), all.begin() + k1), s2(all.begin() + k1, all.begin() + K);
        std::vector<uint32_t> both(all.begin(), all.begin() + K);
        Machine a = expanded(), b;
        EXPECT_EQ(run_union(a, N, s1, s2), encode_basic(N, both));
        EXPECT_EQ(run_union(b, N, s1, s2), encode_basic(N, both));
        EXPECT_EQ(a.gate_count(), b.gate_count());
        EXPECT_EQ(a.peak_live_width(), b.peak_live_width());
    }
}

TEST(EffContains, WorkedExampleBlocks) {
    std::vector<uint32_t> Z{5, 9, 1, 13, 2, 7, 20, 11, 3, 17, 4, 6, 19};
    auto e = encode_eff(20, Z);
    auto p = eff_contains_prog(20, 13);
    for (uint32_t x = 1; x <= 20; ++x) {
        Machine m = expanded();
        std::vector<RegisterRef> regs;
        for (auto& blk : e.blocks) {
            regs.push_back(m.alloc(uint32_t(blk.size()), 3, RegKind::Input));
            m.write(regs.back(), blk);
        }
        regs.push_back(m.alloc(bitlen(20), 2, RegKind::Input));
        m.write_uint(regs.back(), x);
        regs.push_back(m.alloc(1, 2, RegKind::Output));
        m.run(*p, regs);
        bool expect = std::find(Z.begin(), Z.end(), x) != Z.end();
        EXPECT_EQ(m.read_uint(regs.back()), expect ? 1u : 0u) << x;
    }
}

TEST(EffContains, AgreesWithMembershipOverOrderedSubsets) {
    const uint32_t N = 10;
    std::mt19937_64 rng(77);
    int expanded_runs = 0;
    for (uint32_t mask = 1; mask < (1u << N); ++mask) {
        auto S = subset(mask);
        for (int order = 0; order < 3; ++order) {
            std::shuffle(S.begin(), S.end(), rng);
            auto e = encode_eff(N, S);
            auto p = eff_contains_prog(N, uint32_t(S.size()));
            const bool expand = (mask % 37 == 0 && order == 0);
            Machine m(Machine::Options{.use_shortcuts = !expand});
            expanded_runs += expand;
            std::vector<RegisterRef> regs;
            for (auto& blk : e.blocks) {
                regs.push_back(m.alloc(uint32_t(blk.size()), 3, RegKind::Input));
                m.write(regs.back(), blk);
            }
            auto rx = m.alloc(bitlen(N), 2, RegKind::Input);
            auto ro = m.alloc(1, 2, RegKind::Output);
            regs.push_back(rx);
            regs.push_back(ro);
            for (uint32_t x = 1; x <= N; ++x) {
                m.write_uint(rx, x);
                m.write_uint(ro, 0);
                m.run(*p, regs);
                ASSERT_EQ(m.read_uint(ro), (mask >> (x - 1)) & 1) << mask << " " << x;
            }
        }
    }
    EXPECT_GT(expanded_runs, 20);
}

TEST(Programs, RunThenInverseRestoresAndAncillasClean) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        uint32_t N = std::uniform_int_distribution<uint32_t>(2, 12)(rng);
        uint32_t k = std::uniform_int_distribution<uint32_t>(1, N)(rng);
        std::vector<uint32_t> all(N);
        std::iota(all.begin(), all.end(), 1);
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<uint32_t> Z(all.begin(), all.begin() + k);
        Machine m = expanded();
        auto e = encode_eff(N, Z);
        std::vector<RegisterRef> regs;
        for (auto& blk : e.blocks) {
            regs.push_back(m.alloc(uint32_t(blk.size()), 3, RegKind::Input));
            m.write(regs.back(), blk);
        }
        regs.push_back(m.alloc(bitlen(N), 2, RegKind::Input));
        m.write_uint(regs.back(), rng() % (N + 1));
        regs.push_back(m.alloc(1, 2, RegKind::Output));
        m.write_uint(regs.back(), rng() % 2);
        auto before = m.snapshot();
        auto p = eff_contains_prog(N, k);
        m.run(*p, regs);
        m.run(*p->inverse(), regs);
        EXPECT_EQ(m.snapshot(), before);
        auto anc = m.alloc_ancilla(4, 3);
        EXPECT_NO_THROW(m.free(anc));
    }
}

TEST(Programs, CountOnlyStatsEqualFullBuild) {
    for (uint32_t N : {5u, 12u, 20u}) {
        auto cmp = [](const ProgramPtr& a, const ProgramPtr& b) {
            EXPECT_TRUE(b->opaque());
            EXPECT_EQ(a->stats().gates, b->stats().gates);
            EXPECT_EQ(a->stats().peak_cells, b->stats().peak_cells);
            EXPECT_EQ(a->stats().peak_bits, b->stats().peak_bits);
        };
        cmp(contains_prog(N, 3), contains_prog(N, 3, true));
        cmp(convert_prog(N), convert_prog(N, true));
        cmp(union_prog(N, 2, 3), union_prog(N, 2, 3, true));
        cmp(eff_contains_prog(N, 5), eff_contains_prog(N, 5, true));
    }
}

TEST(Programs, AncillaBoundsHold) {
    const auto& c = encoding_constants();
    for (uint32_t N : {4u, 8u, 16u, 32u, 64u, 128u, 256u}) {
        for (uint32_t k : {1u, 2u, 3u, 7u, 13u, 31u}) {
            if (k > N) continue;
            double lg = std::log2(double(N));
            EXPECT_LE(double(eff_contains_prog(N, k, true)->stats().peak_cells), c.eff_alpha * lg + c.eff_beta)
                << N << "," << k;
            for (uint32_t k1 : {1u, k / 2, k}) {
                uint32_t k2 = std::max(1u, k - k1);
                if (k1 == 0 || k1 + k2 > N) continue;
                double K = k1 + k2;
                double bound = c.union_alpha * (K * std::log2(N / K) + K + lg) + c.union_beta;
                EXPECT_LE(double(union_prog(N, k1, k2, true)->stats().peak_cells), bound) << N << "," << k1 << "," << k2;
            }
        }
    }
}

// Gate counts grow polynomially in N with a degree that does not drift with k.
TEST(Programs, GateCountDegreeIndependentOfK) {
    std::vector<double> slopes;
    for (uint32_t k : {1u, 2u, 4u, 8u}) {
        std::vector<double> xs, ys;
        for (uint32_t N = 64; N <= 2048; N *= 2) {
            xs.push_back(std::log2(double(N)));
            ys.push_back(std::log2(double(eff_contains_prog(N, k, true)->stats().gates)));
        }
        double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
        double sxy = 0, sxx = 0;
        for (size_t j = 0; j < xs.size(); ++j) {
            sxy += (xs[j] - mx) * (ys[j] - my);
            sxx += (xs[j] - mx) * (xs[j] - mx);
        }
        slopes.push_back(sxy / sxx);
    }
    auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
    EXPECT_LT(*hi - *lo, 0.25);
    EXPECT_LT(*hi, 2.0);
}
