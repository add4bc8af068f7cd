#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hfchc/encoding.hpp"
#include "hfchc/eppstein.hpp"
#include "hfchc/errors.hpp"
#include "hfchc/qsim.hpp"

using namespace hfchc;

namespace {

uint32_t edge_index(const MultiGraph& g, uint32_t a, uint32_t b) {
    for (uint32_t e : g.incident(a))
        if (g.edge(e).other(a) == b) return e;
    throw std::logic_error("no such edge");
}

// Random base: a cubic graph with some edges forced, then preprocessed the
// way the pipeline does it.
std::optional<qsim::Instance> random_base(std::mt19937_64& rng, uint32_t n, uint32_t one_in) {
    const MultiGraph g = random_cubic(n, rng());
    FchcInstance inst(g);
    for (uint32_t e = 0; e < g.m(); ++e)
        if (rng() % one_in == 0 && inst.forced_degree(g.edge(e).u) < 2 && inst.forced_degree(g.edge(e).v) < 2)
            inst.force(e);
    auto prepared = drop_parallel_duplicates(inst);
    if (!prepared) return std::nullopt;
    triv_red(*prepared);
    qsim::Instance q(*prepared);
    if (q.r() == 0) return std::nullopt;
    return q;
}

std::vector<uint8_t> random_nu(std::mt19937_64& rng, uint32_t r) {
    std::vector<uint8_t> nu(r);
    for (auto& b : nu) b = uint8_t(rng() & 1);
    return nu;
}

// Runs Calculate_i on (ν, EffEnc(Z), 0), returns x_i, and checks that the
// inverse run restores the registers.
uint32_t run_calculate(const qsim::Instance& q, const ProgramPtr& p, const std::vector<uint8_t>& nu,
                       const std::vector<uint32_t>& Z, Machine::Options mo = {}) {
    Machine M(mo);
    const RegisterRef nr = M.alloc(q.r(), 2, RegKind::Input);
    M.write(nr, nu);
    std::vector<RegisterRef> args{nr};
    if (!Z.empty())
        for (const TritString& bl : encode_eff(q.N(), Z).blocks) {
            const RegisterRef r = M.alloc(uint32_t(bl.size()), 3, RegKind::Input);
            M.write(r, bl);
            args.push_back(r);
        }
    const RegisterRef x = M.alloc(bitlen(q.N()), 2, RegKind::Output);
    args.push_back(x);
    const auto before = M.snapshot();
    M.run(*p, args);
    const uint32_t out = uint32_t(M.read_uint(x));
    M.run(*p, args, true);
    EXPECT_EQ(M.snapshot(), before);
    return out;
}

struct Rig {
    Machine M;
    RegisterRef nu, eff, h;
    Rig(const qsim::Instance& q) {
        nu = M.alloc(q.r(), 2, RegKind::Input);
        eff = M.alloc(eff_width(q.N(), q.r()), 3, RegKind::Output);
        h = M.alloc(1, 2, RegKind::Output);
    }
};

std::vector<uint32_t> sorted(std::vector<uint32_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

// A reduced instance with r == want, drawn from forced random cubics.
qsim::Instance instance_with_r(uint64_t seed, uint32_t want) {
    std::mt19937_64 rng(seed);
    for (;;)
        if (auto q = random_base(rng, 8 + 2 * uint32_t(rng() % 2), 3); q && q->r() == want) return *q;
}

}  // namespace

TEST(Instance, RejectsUnreducedBase) {
    const MultiGraph g = named_graph("q3");
    FchcInstance inst(g);
    inst.remove(0);
    EXPECT_THROW(qsim::Instance{inst}, InstanceNotReduced);
    EXPECT_THROW(qsim::Instance{FchcInstance(contract_triangles(named_graph("k4")))}, InstanceNotReduced);
}

TEST(Instance, NuLengthAndDomain) {
    const qsim::Instance q{FchcInstance(named_graph("q3"))};
    EXPECT_EQ(q.s(), 8);
    EXPECT_EQ(q.r(), 36u);  // 8/2 + 4*8
    EXPECT_EQ(q.N(), 2 * 12u + 36u);
    EXPECT_EQ(qsim::nu_length(0), 0u);
    EXPECT_EQ(qsim::nu_length(3), 13u);
    // Dummies run to 2m + r; the domain stays 3m while r ≤ m.
    const qsim::Instance p{FchcInstance(named_graph("petersen"))};
    EXPECT_EQ(p.N(), 2 * p.m() + p.r());
    const qsim::Instance big(qsim::fixed_size_family(40, 6, 1));
    ASSERT_LE(big.r(), big.m());
    EXPECT_EQ(big.N(), 3 * big.m());
}

TEST(Calculate, DegreeTwoRuleTakesFirstFreeEdgeOfFirstVertex) {
    const MultiGraph g = named_graph("q3");
    const qsim::Instance q{FchcInstance(g)};
    // Deleting 2-6 leaves 2 and 6 with degree 2; vertex 2 comes first and
    // its lowest free edge is taken.
    const uint32_t d = edge_index(g, 2, 6);
    const std::vector<uint32_t> Z{q.delete_elem(d)};
    const FchcInstance st = qsim::apply_elements(q, Z);
    const qsim::Step s = qsim::calculate(q, st, 2, true);
    EXPECT_EQ(s.kase, 1);
    EXPECT_FALSE(s.uses_nu);
    EXPECT_EQ(s.element, q.force_elem(g.incident(2)[0] == d ? g.incident(2)[1] : g.incident(2)[0]));
    std::vector<uint8_t> nu(q.r(), 1);
    EXPECT_EQ(run_calculate(q, qsim::calculate_prog(q, 2, {false, false}), nu, Z), s.element);
}

TEST(Calculate, TerminalStateWritesDummy) {
    const MultiGraph g = named_graph("q3");
    const qsim::Instance q{FchcInstance(g)};
    // All four spokes forced: the free graph is two 4-cycles.
    std::vector<uint32_t> Z;
    for (uint32_t v = 0; v < 4; ++v) Z.push_back(q.force_elem(edge_index(g, v, v ^ 4)));
    const uint32_t i = 5;
    const qsim::Step s = qsim::calculate(q, qsim::apply_elements(q, Z), i, true);
    EXPECT_EQ(s.kase, 4);
    EXPECT_EQ(s.element, i + 2 * q.m());
    for (uint8_t bit : {0, 1}) {
        std::vector<uint8_t> nu(q.r(), bit);
        EXPECT_EQ(run_calculate(q, qsim::calculate_prog(q, i, {false, false}), nu, Z), s.element);
    }
}

TEST(Calculate, CircuitMatchesClassicalOnReachableStates) {
    std::mt19937_64 rng(101);
    std::array<int, 8> seen{};
    int checked = 0;
    while (checked < 400) {
        auto q = random_base(rng, 6 + 2 * uint32_t(rng() % 4), 3 + uint32_t(rng() % 5));
        if (!q || q->r() > 60) continue;
        const auto nu = random_nu(rng, q->r());
        const qsim::Trace t = qsim::reduce(*q, nu);
        // Prefer steps before the first dummy, where the cases vary.
        uint32_t lim = 1;
        while (lim < q->r() && t.cases[lim - 1] != 4) ++lim;
        const uint32_t i = 1 + uint32_t(rng() % lim);
        const std::vector<uint32_t> Z(t.X.begin(), t.X.begin() + (i - 1));
        ASSERT_EQ(run_calculate(*q, qsim::calculate_prog(*q, i, {false, false}), nu, Z), t.X[i - 1])
            << "case " << int(t.cases[i - 1]);
        ++seen[t.cases[i - 1]];
        ++checked;
    }
    for (int c = 1; c <= 7; ++c) EXPECT_GT(seen[c], 0) << "case " << c << " never exercised";
}

TEST(Calculate, FullyExpandedIncludingMembershipScans) {
    std::mt19937_64 rng(202);
    int checked = 0;
    while (checked < 12) {
        auto q = random_base(rng, 6 + 2 * uint32_t(rng() % 2), 3);
        if (!q || q->r() > 20) continue;
        const auto nu = random_nu(rng, q->r());
        const qsim::Trace t = qsim::reduce(*q, nu);
        const uint32_t i = 1 + uint32_t(rng() % q->r());
        const std::vector<uint32_t> Z(t.X.begin(), t.X.begin() + (i - 1));
        EXPECT_EQ(run_calculate(*q, qsim::calculate_prog(*q, i, {false, false}), nu, Z, {false, 0}), t.X[i - 1]);
        ++checked;
    }
}

TEST(Calculate, ShortcutAgreesWithBody) {
    std::mt19937_64 rng(303);
    for (int k = 0; k < 100;) {
        auto q = random_base(rng, 8, 4);
        if (!q) continue;
        const auto nu = random_nu(rng, q->r());
        const qsim::Trace t = qsim::reduce(*q, nu);
        const uint32_t i = 1 + uint32_t(rng() % q->r());
        const std::vector<uint32_t> Z(t.X.begin(), t.X.begin() + (i - 1));
        const ProgramPtr fast = qsim::calculate_prog(*q, i), slow = qsim::calculate_prog(*q, i, {false, false});
        EXPECT_TRUE(fast->has_shortcut());
        EXPECT_TRUE(fast->is_calculate());
        EXPECT_EQ(fast->stats().gates, slow->stats().gates);
        EXPECT_EQ(run_calculate(*q, fast, nu, Z), run_calculate(*q, slow, nu, Z));
        ++k;
    }
}

TEST(Calculate, ExactlyOneCaseFires) {
    std::mt19937_64 rng(404);
    for (int k = 0; k < 150;) {
        auto q = random_base(rng, 6 + 2 * uint32_t(rng() % 3), 3 + uint32_t(rng() % 4));
        if (!q || q->r() > 60) continue;
        const auto nu = random_nu(rng, q->r());
        const qsim::Trace t = qsim::reduce(*q, nu);
        const uint32_t i = 1 + uint32_t(rng() % q->r());
        const std::vector<uint32_t> Z(t.X.begin(), t.X.begin() + (i - 1));
        Machine M;
        std::vector<RegisterRef> args{M.alloc(q->r(), 2, RegKind::Input)};
        M.write(args[0], nu);
        if (i > 1)
            for (const TritString& bl : encode_eff(q->N(), Z).blocks) {
                args.push_back(M.alloc(uint32_t(bl.size()), 3, RegKind::Input));
                M.write(args.back(), bl);
            }
        const RegisterRef fc = M.alloc(3, 2, RegKind::Output), fb = M.alloc(1, 2, RegKind::Output);
        const RegisterRef e = M.alloc(bitlen(q->N()), 2, RegKind::Output), a = M.alloc(1, 2, RegKind::Output);
        for (RegisterRef r : {fc, fb, e, a}) args.push_back(r);
        M.run(*qsim::cascade_prog(*q, i), args);
        const int j = t.cases[i - 1];
        // The counter ticks in the firing block and every block after it.
        EXPECT_EQ(M.read_uint(fc), uint64_t(8 - j));
        EXPECT_EQ(M.read_uint(fb), 1u);
        EXPECT_EQ(M.read_uint(e) + M.read_uint(a) * q->m(), t.X[i - 1]);
        ++k;
    }
}

TEST(Reduce, DecodesToClassicalSetForEveryNu) {
    for (uint64_t seed : {1u, 2u}) {
        const qsim::Instance q = instance_with_r(seed, 13);
        const ProgramPtr red = qsim::reduce_prog(q);
        Rig rig(q);
        for (uint64_t u = 0; u < (1u << q.r()); ++u) {
            std::vector<uint8_t> nu(q.r());
            for (uint32_t i = 0; i < q.r(); ++i) nu[i] = uint8_t((u >> (q.r() - 1 - i)) & 1);
            rig.M.write(rig.nu, nu);
            const auto before = rig.M.snapshot();
            rig.M.run(*red, {rig.nu, rig.eff});
            const auto X = decode_eff(q.N(), q.r(), rig.M.read(rig.eff));
            ASSERT_EQ(sorted(X), sorted(qsim::reduce(q, nu).X)) << "ν index " << u;
            rig.M.run(*red, {rig.nu, rig.eff}, true);
            ASSERT_EQ(rig.M.snapshot(), before);
        }
    }
}

TEST(Reduce, SampledAtEighteenSteps) {
    const qsim::Instance q = instance_with_r(7, 18);
    const ProgramPtr red = qsim::reduce_prog(q);
    Rig rig(q);
    std::mt19937_64 rng(8);
    for (int k = 0; k < 300; ++k) {
        const auto nu = random_nu(rng, q.r());
        rig.M.write(rig.nu, nu);
        rig.M.run(*red, {rig.nu, rig.eff});
        EXPECT_EQ(sorted(decode_eff(q.N(), q.r(), rig.M.read(rig.eff))), sorted(qsim::reduce(q, nu).X));
        rig.M.run(*red, {rig.nu, rig.eff}, true);
    }
}

TEST(Reduce, CalculateCallsWithinPlanBound) {
    for (uint32_t want : {4u, 9u, 13u, 18u}) {
        const qsim::Instance q = instance_with_r(want, want);
        const ProgramPtr red = qsim::reduce_prog(q);
        const uint32_t L = uint32_t(std::floor(std::log2(double(q.r()))));
        uint64_t bound = 0;
        for (uint32_t l = 0; l <= L; ++l) bound += uint64_t(1) << (2 * l);
        EXPECT_LE(red->stats().calculate_calls, 2 * bound) << "r=" << q.r();
    }
}

TEST(Reduce, OneElementPerStep) {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 200;) {
        auto q = random_base(rng, 6 + 2 * uint32_t(rng() % 5), 3);
        if (!q) continue;
        const qsim::Trace t = qsim::reduce(*q, random_nu(rng, q->r()));
        ASSERT_EQ(t.X.size(), q->r());
        std::vector<uint32_t> s = sorted(t.X);
        EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
        ++k;
    }
}

TEST(Reduce, IgnoredBitsDoNotMatter) {
    std::mt19937_64 rng(10);
    for (int k = 0; k < 300;) {
        auto q = random_base(rng, 6 + 2 * uint32_t(rng() % 5), 2 + uint32_t(rng() % 4));
        if (!q) continue;
        auto nu = random_nu(rng, q->r());
        const qsim::Trace t = qsim::reduce(*q, nu);
        for (uint32_t i = 0; i < q->r(); ++i) {
            if (t.consumed[i]) continue;
            nu[i] ^= 1;
            EXPECT_EQ(qsim::reduce(*q, nu).X, t.X);
            nu[i] ^= 1;
        }
        ++k;
    }
}

TEST(Check, ReplayedAcceptingPathOnCube) {
    const FchcInstance base(named_graph("q3"));
    const Verdict v = solve(base);
    ASSERT_TRUE(v.result);
    const qsim::Instance q(base);
    std::vector<uint8_t> nu = v.stats.accepting.at(0).nu;
    ASSERT_LE(nu.size(), q.r());
    nu.resize(q.r(), 0);
    Rig rig(q);
    rig.M.write(rig.nu, nu);
    const auto before = rig.M.snapshot();
    const ProgramPtr red = qsim::reduce_prog(q), chk = qsim::check_prog(q, {false, false});
    rig.M.run(*red, {rig.nu, rig.eff});
    rig.M.run(*chk, {rig.eff, rig.h});
    EXPECT_EQ(rig.M.read_uint(rig.h), 1u);
    rig.M.run(*chk, {rig.eff, rig.h}, true);
    rig.M.run(*red, {rig.nu, rig.eff}, true);
    EXPECT_EQ(rig.M.snapshot(), before);
}

TEST(Check, DisconnectingDeletionsReject) {
    const MultiGraph g = named_graph("q3");
    const qsim::Instance q{FchcInstance(g)};
    // Deleting the four spokes leaves two free 4-cycles with no other
    // defect than the cut between them.
    std::vector<uint32_t> X;
    for (uint32_t v = 0; v < 4; ++v) X.push_back(q.delete_elem(edge_index(g, v, v ^ 4)));
    for (uint32_t i = 5; i <= q.r(); ++i) X.push_back(q.dummy_elem(i));
    const FchcInstance st = qsim::apply_elements(q, X);
    EXPECT_TRUE(free_collection(st));
    EXPECT_FALSE(is_connected(st));
    EXPECT_FALSE(qsim::check(q, st));
    Machine M;
    const RegisterRef eff = M.alloc(eff_width(q.N(), q.r()), 3, RegKind::Input), h = M.alloc(1, 2, RegKind::Output);
    M.write(eff, encode_eff(q.N(), X).flat());
    M.run(*qsim::check_prog(q, {false, false}), {eff, h});
    EXPECT_EQ(M.read_uint(h), 0u);
}

TEST(Check, CircuitMatchesClassicalForEveryNu) {
    const qsim::Instance q = instance_with_r(3, 13);
    const ProgramPtr red = qsim::reduce_prog(q), chk = qsim::check_prog(q, {false, false});
    Rig rig(q);
    int accepted = 0;
    for (uint64_t u = 0; u < (1u << q.r()); ++u) {
        std::vector<uint8_t> nu(q.r());
        for (uint32_t i = 0; i < q.r(); ++i) nu[i] = uint8_t((u >> (q.r() - 1 - i)) & 1);
        rig.M.write(rig.nu, nu);
        rig.M.run(*red, {rig.nu, rig.eff});
        rig.M.run(*chk, {rig.eff, rig.h});
        const bool h = rig.M.read_uint(rig.h) != 0;
        ASSERT_EQ(h, qsim::check(q, qsim::reduce(q, nu).final_state));
        accepted += h;
        rig.M.run(*chk, {rig.eff, rig.h}, true);
        rig.M.run(*red, {rig.nu, rig.eff}, true);
    }
    EXPECT_EQ(accepted > 0, brute_force_fchc(q.base()));
}

TEST(Check, AdjacencyUsesThreeMembershipCalls) {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 6;) {
        auto q = random_base(rng, 8, 3);
        if (!q) continue;
        const qsim::Trace t = qsim::reduce(*q, random_nu(rng, q->r()));
        const ProgramPtr adj = qsim::adjacency_prog(*q);
        const uint32_t vb = bitlen(q->n() - 1);
        Machine M;
        std::vector<RegisterRef> args;
        for (const TritString& bl : encode_eff(q->N(), t.X).blocks) {
            args.push_back(M.alloc(uint32_t(bl.size()), 3, RegKind::Input));
            M.write(args.back(), bl);
        }
        const RegisterRef v = M.alloc(vb, 2, RegKind::Input), w = M.alloc(vb, 2, RegKind::Input);
        const RegisterRef out = M.alloc(1, 2, RegKind::Output);
        args.insert(args.end(), {v, w, out});
        uint64_t calls = 0;
        M.set_observer([&](const Program& p, bool, bool entering, const Machine&) {
            calls += entering && p.name() == "eff_contains";
        });
        for (uint32_t a = 0; a < q->n(); ++a)
            for (uint32_t b = 0; b < q->n(); ++b) {
                M.write_uint(v, a);
                M.write_uint(w, b);
                calls = 0;
                M.run(*adj, args);
                EXPECT_LE(calls, 3u);
                EXPECT_EQ(M.read_uint(out) != 0, qsim::adjacent(*q, t.final_state, a, b));
                M.run(*adj, args, true);
                EXPECT_EQ(M.read_uint(out), 0u);
            }
        ++k;
    }
}

TEST(Search, PetersenRejectedInEveryFeasibleMode) {
    const qsim::Instance q{FchcInstance(named_graph("petersen"))};
    EXPECT_FALSE(qsim::enumerate_search(q, {qsim::Mode::BranchPruned}).found);
    qsim::SearchOptions so{qsim::Mode::Sampled};
    so.trials = 2000;
    EXPECT_FALSE(qsim::enumerate_search(q, so).found);
    // r = 45 puts 2^r strings out of reach.
    EXPECT_THROW(qsim::enumerate_search(q, {qsim::Mode::Exhaustive}), SearchSpaceTooLarge);
}

TEST(Search, CubeAcceptsWithinDepthBound) {
    const qsim::Instance q{FchcInstance(named_graph("q3"))};
    const qsim::SearchReport rep = qsim::enumerate_search(q);
    ASSERT_TRUE(rep.found);
    EXPECT_LE(rep.branch_bits, 4u);
    EXPECT_EQ(rep.branch_bits + rep.t_measured, q.r());
    EXPECT_LE(rep.grover_estimate, 4u);
    EXPECT_TRUE(qsim::check(q, qsim::reduce(q, rep.witness).final_state));
}

TEST(Search, ExhaustiveAndPrunedAgree) {
    std::mt19937_64 rng(13);
    int compared = 0;
    for (int k = 0; k < 800; ++k) {
        auto q = random_base(rng, 6 + 2 * uint32_t(rng() % 4), 2 + uint32_t(rng() % 3));
        if (!q || q->r() > 13) continue;
        const qsim::SearchReport ex = qsim::enumerate_search(*q, {qsim::Mode::Exhaustive});
        const qsim::SearchReport pr = qsim::enumerate_search(*q, {qsim::Mode::BranchPruned});
        ASSERT_EQ(ex.found, pr.found);
        EXPECT_EQ(ex.witness, pr.witness);
        EXPECT_EQ(ex.found, brute_force_fchc(q->base()));
        ++compared;
    }
    EXPECT_GT(compared, 100);
}

TEST(Search, OrOverAllNuAtEighteenSteps) {
    for (uint64_t seed : {21u, 22u}) {
        const qsim::Instance q = instance_with_r(seed, 18);
        const qsim::SearchReport ex = qsim::enumerate_search(q, {qsim::Mode::Exhaustive});
        EXPECT_EQ(ex.found, solve(q.base()).result);
    }
}

TEST(Search, ParallelMatchesSerial) {
    const qsim::Instance q = instance_with_r(31, 13);
    for (qsim::Mode mode : {qsim::Mode::Exhaustive, qsim::Mode::Sampled}) {
        qsim::SearchOptions a{mode}, b{mode};
        a.parallel = true;
        b.parallel = false;
        const auto ra = qsim::enumerate_search(q, a), rb = qsim::enumerate_search(q, b);
        EXPECT_EQ(ra.found, rb.found);
        EXPECT_EQ(ra.witness, rb.witness);
        EXPECT_EQ(ra.hits, rb.hits);
    }
}

TEST(Search, SampledHitRateMatchesIgnoredBits) {
    // A small accepting instance whose accepting strings are exactly the 2^t
    // completions of one branch path.
    std::mt19937_64 rng(14);
    for (;;) {
        auto q = random_base(rng, 8, 3);
        if (!q || q->r() < 9 || q->r() > 13) continue;
        const qsim::SearchReport ex = qsim::enumerate_search(*q, {qsim::Mode::Exhaustive});
        if (!ex.found || ex.branch_bits == 0) continue;
        uint64_t count = 0;
        for (uint64_t u = 0; u < (1u << q->r()); ++u) {
            std::vector<uint8_t> nu(q->r());
            for (uint32_t i = 0; i < q->r(); ++i) nu[i] = uint8_t((u >> (q->r() - 1 - i)) & 1);
            count += qsim::check(*q, qsim::reduce(*q, nu).final_state);
        }
        if (count != (uint64_t(1) << ex.t_measured)) continue;
        qsim::SearchOptions so{qsim::Mode::Sampled};
        so.trials = 100000;
        so.seed = 99;
        const qsim::SearchReport rep = qsim::enumerate_search(*q, so);
        const double p = std::exp2(double(ex.t_measured) - double(q->r()));
        const double sigma = std::sqrt(double(so.trials) * p * (1 - p));
        EXPECT_NEAR(double(rep.hits), double(so.trials) * p, 3 * sigma);
        break;
    }
}

TEST(Grover, ZeroBranchBitsIsOneIteration) {
    qsim::SearchReport rep;
    rep.found = true;
    rep.r = 13;
    rep.t_measured = 13;
    rep.branch_bits = 0;
    const qsim::Instance q = instance_with_r(1, 13);
    const qsim::GroverEstimate g = qsim::grover_cost_model(rep, q);
    EXPECT_EQ(g.iterations, 1u);
    EXPECT_TRUE(g.within_bound);
    rep.found = false;
    const qsim::GroverEstimate w = qsim::grover_cost_model(rep, q);
    EXPECT_TRUE(w.no_witness);
    EXPECT_EQ(w.iterations, uint64_t(std::ceil(std::numbers::pi / 4 * std::exp2(13 / 2.0))));
}

TEST(Grover, CorpusEstimatesWithinExponent) {
    for (uint32_t n = 6; n <= 12; n += 2)
        for (const MultiGraph& g : cubic_corpus(n, true)) {
            const qsim::PipelineResult res = qsim::solve_pipeline(FchcInstance(g));
            if (!res.verdict || !res.report) continue;
            const double cap = std::ceil(std::numbers::pi / 4 * std::exp2(double(res.s) / 4));
            EXPECT_LE(res.report->branch_bits, uint32_t((res.s + 1) / 2));
            EXPECT_LE(double(res.report->grover_estimate), cap);
        }
}

TEST(Search, PipelineMatchesSolverOnCorpus) {
    for (uint32_t n = 6; n <= 12; n += 2)
        for (const MultiGraph& g : cubic_corpus(n, true)) {
            const FchcInstance inst(g);
            EXPECT_EQ(qsim::solve_pipeline(inst).verdict, solve(inst).result);
        }
}

TEST(Space, EffRegionWithinBound) {
    for (uint32_t n = 6; n <= 12; n += 2)
        for (const MultiGraph& g : cubic_corpus(n, true)) {
            const qsim::Instance q{FchcInstance(g)};
            const qsim::SpaceReport s = qsim::qubit_accounting(q);
            EXPECT_LE(s.eff_cells, s.eff_bound_trits);
            if (q.s() >= 8) {
                EXPECT_GT(s.ordered_list_bits, s.eff_cells);
            }
            EXPECT_EQ(s.total_cells, s.nu_cells + s.eff_cells + s.out_cells + s.ancilla_cells);
        }
}

TEST(Space, SublinearInNAtFixedSize) {
    std::vector<double> xs, ys;
    int64_t s0 = -1;
    for (uint32_t n = 8; n <= 64; n += 4) {
        const qsim::Instance q(qsim::fixed_size_family(n, 6, n));
        if (s0 < 0) s0 = q.s();
        ASSERT_EQ(q.s(), s0);
        xs.push_back(double(n));
        ys.push_back(double(qsim::qubit_accounting(q).total_cells));
    }
    // Growth from n=8 to n=64 is far below the 8x growth of n itself.
    EXPECT_GT(ys.back(), ys.front());
    EXPECT_LT(ys.back() / ys.front(), 2.0);
}
