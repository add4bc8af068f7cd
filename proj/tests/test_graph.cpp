#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "hfchc/errors.hpp"
#include "hfchc/graph.hpp"

using namespace hfchc;

namespace {

// Reference Hamiltonicity: try every vertex order starting at 0 and every
// choice of parallel edge between consecutive vertices.
bool perm_oracle(const FchcInstance& inst) {
    const MultiGraph& g = inst.graph();
    const uint32_t n = g.n();
    if (n <= 1) return false;
    auto edges_between = [&](uint32_t a, uint32_t b) {
        std::vector<uint32_t> out;
        for (uint32_t e : g.incident(a))
            if (inst.live(e) && g.edge(e).other(a) == b) out.push_back(e);
        return out;
    };
    const uint32_t forced = inst.forced_count();
    if (n == 2) {
        auto es = edges_between(0, 1);
        for (size_t i = 0; i < es.size(); ++i)
            for (size_t j = i + 1; j < es.size(); ++j)
                if (uint32_t(inst.forced(es[i]) + inst.forced(es[j])) == forced) return true;
        return false;
    }
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    do {
        // Each consecutive pair contributes its forced edge when it has one.
        uint32_t hit = 0;
        bool ok = true;
        for (uint32_t k = 0; ok && k < n; ++k) {
            auto es = edges_between(order[k], order[(k + 1) % n]);
            if (es.empty()) ok = false;
            else hit += std::any_of(es.begin(), es.end(), [&](uint32_t e) { return inst.forced(e); });
        }
        if (ok && hit == forced) return true;
    } while (std::next_permutation(order.begin() + 1, order.end()));
    return false;
}

bool uf_connected(const MultiGraph& g) {
    std::vector<uint32_t> p(g.n());
    std::iota(p.begin(), p.end(), 0u);
    auto find = [&](uint32_t x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    };
    for (const Edge& e : g.edges()) p[find(e.u)] = find(e.v);
    std::set<uint32_t> roots;
    for (uint32_t v = 0; v < g.n(); ++v) roots.insert(find(v));
    return roots.size() <= 1;
}

// Random simple graph of max degree 3 (not necessarily cubic or connected).
MultiGraph random_sparse(uint32_t n, uint32_t tries, std::mt19937_64& rng) {
    MultiGraph g(n);
    std::uniform_int_distribution<uint32_t> pick(0, n - 1);
    for (uint32_t t = 0; t < tries; ++t) {
        const uint32_t a = pick(rng), b = pick(rng);
        if (a == b || g.degree(a) == 3 || g.degree(b) == 3) continue;
        bool dup = false;
        for (uint32_t e : g.incident(a)) dup |= g.edge(e).other(a) == b;
        if (!dup) g.add_edge(a, b);
    }
    return g;
}

uint32_t edge_index(const MultiGraph& g, uint32_t a, uint32_t b) {
    for (uint32_t e : g.incident(a))
        if (g.edge(e).other(a) == b) return e;
    throw std::logic_error("no such edge");
}

}  // namespace

TEST(Parse, SingleEdge) {
    auto p = parse_graph("p 2 1\ne 1 2\n");
    EXPECT_EQ(p.g.n(), 2u);
    ASSERT_EQ(p.g.m(), 1u);
    EXPECT_EQ(p.g.edge(0), (Edge{0, 1}));
    EXPECT_TRUE(p.forced.empty());
}

TEST(Parse, ErrorsCarryLineNumbers) {
    EXPECT_THROW(parse_graph("p 2 1\ne 1 1\n"), SelfLoop);
    EXPECT_THROW(parse_graph("p 2 4\ne 1 2\ne 1 2\ne 1 2\ne 1 2\n"), DegreeExceeded);
    try {
        parse_graph("c hello\np 3 2\ne 1 2\ne 1 9\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 4);
    }
    EXPECT_THROW(parse_graph("e 1 2\n"), ParseError);
    EXPECT_THROW(parse_graph("p 3 2\ne 1 2\n"), ParseError);
    EXPECT_THROW(parse_graph("p 3 1\ne 1 2\nf 2\n"), ParseError);
    EXPECT_THROW(parse_graph("p 3 1\ne 1 2\nx\n"), ParseError);
}

TEST(Parse, RoundTripKeepsEdgeOrderAndForced) {
    const char* text = "c q3 fragment\np 4 4\ne 3 4\ne 1 2\ne 2 3\ne 4 1\nf 3\nf 1\n";
    auto p = parse_graph(text);
    EXPECT_EQ(p.g.edge(0), (Edge{2, 3}));
    EXPECT_EQ(p.forced, (std::vector<uint32_t>{2, 0}));
    auto q = parse_graph(serialize_graph(p.g, p.forced));
    EXPECT_EQ(q.g, p.g);
    EXPECT_EQ(q.forced, p.forced);
}

TEST(Parse, CubeFileIsCubic) {
    const MultiGraph q3 = named_graph("q3");
    auto p = parse_graph(serialize_graph(q3));
    EXPECT_EQ(p.g.n(), 8u);
    EXPECT_EQ(p.g.m(), 12u);
    EXPECT_TRUE(p.g.is_cubic());
}

TEST(Contract, TriangleFreeUnchanged) {
    for (const char* name : {"k33", "q3", "petersen"}) {
        const MultiGraph g = named_graph(name);
        EXPECT_EQ(contract_triangles(g), g) << name;
    }
}

TEST(Contract, K4AndPrismCollapseToTripleEdge) {
    for (const char* name : {"k4", "prism"}) {
        const MultiGraph c = contract_triangles(named_graph(name));
        EXPECT_EQ(c.n(), 2u) << name;
        EXPECT_EQ(c.m(), 3u) << name;
        EXPECT_TRUE(c.is_cubic());
        EXPECT_TRUE(brute_force_fchc(FchcInstance(c)));
        EXPECT_TRUE(brute_force_fchc(FchcInstance(named_graph(name))));
    }
}

TEST(Contract, PreservesHamiltonicity) {
    int checked = 0;
    for (uint32_t n = 4; n <= 12; n += 2)
        for (const MultiGraph& g : cubic_corpus(n, false)) {
            const MultiGraph c = contract_triangles(g);
            EXPECT_FALSE(c.n() >= 4 && has_triangle(c));
            EXPECT_EQ(brute_force_fchc(FchcInstance(c)), brute_force_fchc(FchcInstance(g)));
            ++checked;
        }
    for (uint64_t seed = 0; seed < 40; ++seed) {
        const MultiGraph g = random_cubic(14, seed);
        EXPECT_EQ(brute_force_fchc(FchcInstance(contract_triangles(g))), brute_force_fchc(FchcInstance(g)));
    }
    EXPECT_EQ(checked, 1 + 2 + 5 + 19 + 85);
}

TEST(FourCycles, MatchSubsetEnumeration) {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 60; ++round) {
        const uint32_t n = 4 + round % 9;
        const MultiGraph g = random_sparse(n, 3 * n, rng);
        std::set<std::set<uint32_t>> ours;
        for (const FourCycle& c : four_cycles(g)) ours.insert({c.e.begin(), c.e.end()});
        std::set<std::set<uint32_t>> ref;
        for (uint32_t a = 0; a < n; ++a)
            for (uint32_t b = 0; b < n; ++b)
                for (uint32_t c = 0; c < n; ++c)
                    for (uint32_t d = 0; d < n; ++d) {
                        if (std::set<uint32_t>{a, b, c, d}.size() != 4) continue;
                        try {
                            ref.insert({edge_index(g, a, b), edge_index(g, b, c), edge_index(g, c, d), edge_index(g, d, a)});
                        } catch (const std::logic_error&) {
                        }
                    }
        EXPECT_EQ(ours, ref);
        EXPECT_EQ(four_cycles(g).size(), ours.size()) << "a cycle was listed twice";
    }
}

TEST(IsolatedCycles, EmptyWithoutForcedEdges) {
    EXPECT_TRUE(unforced_isolated_cycles(FchcInstance(named_graph("q3"))).empty());
}

TEST(IsolatedCycles, SpokesForcedMakesMember) {
    // Q3 with the four edges between the two faces forced.
    const MultiGraph q3 = named_graph("q3");
    std::vector<uint32_t> spokes;
    for (uint32_t v = 0; v < 4; ++v) spokes.push_back(edge_index(q3, v, v ^ 4));
    FchcInstance inst(q3, spokes);
    auto cs = unforced_isolated_cycles(inst);
    EXPECT_EQ(cs.size(), 2u);
    for (uint32_t c : cs)
        for (uint32_t e : inst.data().cycles[c].e) EXPECT_TRUE(inst.free(e));
    EXPECT_EQ(size_metric(inst), 8 - 4 - 2);
}

TEST(IsolatedCycles, MatchSubsetOracle) {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 200; ++round) {
        const uint32_t n = 2 * (2 + round % 5);
        const MultiGraph g = random_cubic(n, rng());
        FchcInstance inst(g);
        for (uint32_t e = 0; e < g.m(); ++e) {
            const auto roll = rng() % 4;
            if (roll == 0) inst.force(e);
            if (roll == 1) inst.remove(e);
        }
        size_t ref = 0;
        for (uint32_t a = 0; a < n; ++a)
            for (uint32_t b = a + 1; b < n; ++b)
                for (uint32_t c = b + 1; c < n; ++c)
                    for (uint32_t d = c + 1; d < n; ++d) {
                        std::array<uint32_t, 4> vs{a, b, c, d};
                        if (!std::all_of(vs.begin(), vs.end(), [&](uint32_t v) { return inst.forced_degree(v) > 0; }))
                            continue;
                        // Each of the three cyclic orders on four vertices.
                        for (auto ord : {std::array<uint32_t, 4>{a, b, c, d}, {a, b, d, c}, {a, c, b, d}}) {
                            bool ok = true;
                            for (int k = 0; ok && k < 4; ++k) {
                                bool found = false;
                                for (uint32_t e : g.incident(ord[k]))
                                    found |= g.edge(e).other(ord[k]) == ord[(k + 1) % 4] && inst.free(e);
                                ok = found;
                            }
                            ref += ok;
                        }
                    }
        EXPECT_EQ(unforced_isolated_cycles(inst).size(), ref);
    }
}

TEST(SizeMetric, CubeAndClamp) {
    EXPECT_EQ(size_metric(FchcInstance(named_graph("q3"))), 8);
    const MultiGraph k33 = named_graph("k33");
    std::vector<uint32_t> all(k33.m());
    std::iota(all.begin(), all.end(), 0u);
    EXPECT_EQ(size_metric(FchcInstance(k33, all)), 0);
}

TEST(Connectivity, Basics) {
    EXPECT_TRUE(is_connected(MultiGraph(1)));
    MultiGraph two(8);
    for (uint32_t base : {0u, 4u})
        for (uint32_t k = 0; k < 4; ++k) two.add_edge(base + k, base + (k + 1) % 4);
    EXPECT_FALSE(is_connected(two));
}

TEST(Connectivity, MatchesUnionFind) {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 300; ++round) {
        const uint32_t n = 1 + uint32_t(rng() % 200);
        const MultiGraph g = random_sparse(n, uint32_t(rng() % (2 * n + 1)), rng);
        EXPECT_EQ(is_connected(g), uf_connected(g));
    }
}

TEST(Connectivity, InstanceIgnoresDeletedEdges) {
    FchcInstance inst(named_graph("q3"));
    for (uint32_t v = 0; v < 4; ++v) inst.remove(edge_index(inst.graph(), v, v ^ 4));
    EXPECT_FALSE(is_connected(inst));
    EXPECT_TRUE(is_connected(inst.graph()));
}

TEST(RandomCubic, DeterministicSimpleConnected) {
    EXPECT_EQ(cubic_canonical_code(random_cubic(4, 9)), cubic_canonical_code(named_graph("k4")));
    for (uint32_t n : {6u, 10u, 16u, 30u}) {
        const MultiGraph g = random_cubic(n, 42);
        EXPECT_TRUE(g.is_cubic());
        EXPECT_FALSE(g.has_parallel_edges());
        EXPECT_TRUE(is_connected(g));
        EXPECT_EQ(g, random_cubic(n, 42));
    }
    EXPECT_THROW(random_cubic(7, 1), GenerationFailed);
}

TEST(BruteForce, NamedFixtures) {
    EXPECT_TRUE(brute_force_fchc(FchcInstance(named_graph("k33"))));
    EXPECT_TRUE(brute_force_fchc(FchcInstance(named_graph("q3"))));
    EXPECT_FALSE(brute_force_fchc(FchcInstance(named_graph("petersen"))));
}

TEST(BruteForce, CubeWithForcedCycles) {
    const MultiGraph q3 = named_graph("q3");
    // Gray-code tour 0-1-3-2-6-7-5-4-0.
    const uint32_t tour[] = {0, 1, 3, 2, 6, 7, 5, 4};
    std::vector<uint32_t> ham;
    for (int k = 0; k < 8; ++k) ham.push_back(edge_index(q3, tour[k], tour[(k + 1) % 8]));
    EXPECT_TRUE(brute_force_fchc(FchcInstance(q3, ham)));
    const uint32_t face[] = {0, 1, 3, 2};
    std::vector<uint32_t> square;
    for (int k = 0; k < 4; ++k) square.push_back(edge_index(q3, face[k], face[(k + 1) % 4]));
    EXPECT_FALSE(brute_force_fchc(FchcInstance(q3, square)));
}

TEST(BruteForce, TwoVertexMultigraph) {
    MultiGraph g(2);
    g.add_edge(0, 1);
    EXPECT_FALSE(brute_force_fchc(FchcInstance(g)));
    g.add_edge(0, 1);
    g.add_edge(0, 1);
    EXPECT_TRUE(brute_force_fchc(FchcInstance(g)));
    std::vector<uint32_t> all{0, 1, 2};
    EXPECT_FALSE(brute_force_fchc(FchcInstance(g, all)));
    EXPECT_FALSE(brute_force_fchc(FchcInstance(MultiGraph(1))));
}

TEST(BruteForce, LimitEnforced) {
    EXPECT_THROW(brute_force_fchc(FchcInstance(random_cubic(22, 1))), OracleLimitExceeded);
    EXPECT_NO_THROW(brute_force_fchc(FchcInstance(random_cubic(22, 1)), 22));
}

TEST(BruteForce, MatchesPermutationOracle) {
    std::mt19937_64 rng(17);
    int yes = 0, no = 0;
    for (int round = 0; round < 400; ++round) {
        const uint32_t n = 2 * (2 + round % 3);
        MultiGraph g = round % 5 == 0 ? contract_triangles(random_cubic(n + 2, rng())) : random_cubic(n, rng());
        FchcInstance inst(g);
        for (uint32_t e = 0; e < g.m(); ++e) {
            const auto roll = rng() % 6;
            if (roll == 0) inst.force(e);
            if (roll == 1) inst.remove(e);
        }
        const bool want = perm_oracle(inst);
        EXPECT_EQ(brute_force_fchc(inst), want);
        (want ? yes : no)++;
    }
    EXPECT_GT(yes, 20);
    EXPECT_GT(no, 20);
}

TEST(Corpus, KnownCounts) {
    const size_t all[] = {1, 2, 5, 19, 85};
    const size_t tf[] = {0, 1, 2, 6, 22};
    for (uint32_t k = 0; k < 5; ++k) {
        const uint32_t n = 4 + 2 * k;
        EXPECT_EQ(cubic_corpus(n, false).size(), all[k]) << n;
        EXPECT_EQ(cubic_corpus(n, true).size(), tf[k]) << n;
    }
}

TEST(Corpus, MembersAreDistinctConnectedCubic) {
    for (uint32_t n = 6; n <= 12; n += 2) {
        std::set<std::vector<uint8_t>> codes;
        for (const MultiGraph& g : cubic_corpus(n)) {
            EXPECT_TRUE(g.is_cubic());
            EXPECT_TRUE(is_connected(g));
            EXPECT_FALSE(has_triangle(g));
            codes.insert(cubic_canonical_code(g));
        }
        EXPECT_EQ(codes.size(), cubic_corpus(n).size());
    }
}

TEST(Corpus, CanonicalCodeIsRelabelingInvariant) {
    std::mt19937_64 rng(2);
    for (const MultiGraph& g : cubic_corpus(10)) {
        std::vector<uint32_t> perm(g.n());
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        MultiGraph h(g.n());
        for (const Edge& e : g.edges()) h.add_edge(perm[e.u], perm[e.v]);
        EXPECT_EQ(cubic_canonical_code(h), cubic_canonical_code(g));
    }
}
