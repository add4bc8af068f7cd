#pragma once

// Multigraphs of maximum degree 3 and forced-cubic-Hamiltonian-cycle
// instances over them. Vertices and edges are 0-based internally; the text
// format is 1-based. Edge indices are stable and define the global
// enumeration order used for every tie-break downstream.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hfchc {

struct Edge {
    uint32_t u = 0;
    uint32_t v = 0;
    uint32_t other(uint32_t x) const { return x == u ? v : u; }
    friend bool operator==(const Edge&, const Edge&) = default;
};

class MultiGraph {
public:
    MultiGraph() = default;
    explicit MultiGraph(uint32_t n);

    // Throws SelfLoop, DegreeExceeded, or std::out_of_range on a bad vertex.
    uint32_t add_edge(uint32_t u, uint32_t v);

    uint32_t n() const { return static_cast<uint32_t>(deg_.size()); }
    uint32_t m() const { return static_cast<uint32_t>(edges_.size()); }
    const Edge& edge(uint32_t e) const { return edges_[e]; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::span<const uint32_t> incident(uint32_t v) const { return {inc_[v].data(), deg_[v]}; }
    uint32_t degree(uint32_t v) const { return deg_[v]; }
    bool is_cubic() const;
    bool has_parallel_edges() const;

    friend bool operator==(const MultiGraph& a, const MultiGraph& b) { return a.deg_.size() == b.deg_.size() && a.edges_ == b.edges_; }

private:
    std::vector<Edge> edges_;
    std::vector<std::array<uint32_t, 3>> inc_;
    std::vector<uint8_t> deg_;
};

// v[0] -e[0]- v[1] -e[1]- v[2] -e[2]- v[3] -e[3]- v[0], four distinct vertices.
struct FourCycle {
    std::array<uint32_t, 4> v;
    std::array<uint32_t, 4> e;
    bool has_vertex(uint32_t x) const { return v[0] == x || v[1] == x || v[2] == x || v[3] == x; }
    bool has_edge(uint32_t x) const { return e[0] == x || e[1] == x || e[2] == x || e[3] == x; }
};

// All 4-cycles, ordered by (smallest vertex, walk), each listed once.
std::vector<FourCycle> four_cycles(const MultiGraph& g);

// A graph together with its precomputed 4-cycle list.
struct GraphData {
    MultiGraph g;
    std::vector<FourCycle> cycles;
    std::vector<std::vector<uint32_t>> cycles_of_edge;

    explicit GraphData(MultiGraph graph);
};

enum class EdgeState : uint8_t { Free, Forced, Deleted };

class FchcInstance {
public:
    FchcInstance() = default;
    explicit FchcInstance(MultiGraph g, std::span<const uint32_t> forced = {});
    explicit FchcInstance(std::shared_ptr<const GraphData> data);

    const MultiGraph& graph() const { return data_->g; }
    const GraphData& data() const { return *data_; }
    std::shared_ptr<const GraphData> shared_data() const { return data_; }
    uint32_t n() const { return data_->g.n(); }
    uint32_t m() const { return data_->g.m(); }

    EdgeState state(uint32_t e) const { return state_[e]; }
    bool live(uint32_t e) const { return state_[e] != EdgeState::Deleted; }
    bool forced(uint32_t e) const { return state_[e] == EdgeState::Forced; }
    bool free(uint32_t e) const { return state_[e] == EdgeState::Free; }
    void force(uint32_t e);
    void remove(uint32_t e);

    uint32_t live_degree(uint32_t v) const;
    uint32_t forced_degree(uint32_t v) const;
    uint32_t forced_count() const;
    std::vector<uint32_t> forced_edges() const;
    std::vector<uint32_t> deleted_edges() const;
    const std::vector<EdgeState>& states() const { return state_; }

    friend bool operator==(const FchcInstance& a, const FchcInstance& b) { return a.data_ == b.data_ && a.state_ == b.state_; }

private:
    std::shared_ptr<const GraphData> data_;
    std::vector<EdgeState> state_;
};

struct ParsedGraph {
    MultiGraph g;
    std::vector<uint32_t> forced;  // 0-based edge indices
};

// Format: "p <n> <m>", then "e <u> <v>" lines (1-based) whose order defines
// edge indices, optional "f <edge>" lines (1-based), "c" comments.
ParsedGraph parse_graph(std::string_view text);
ParsedGraph read_graph_file(const std::string& path);
std::string serialize_graph(const MultiGraph& g, std::span<const uint32_t> forced = {});

// Merges triangles into single vertices until none remain (only while n >= 4).
MultiGraph contract_triangles(const MultiGraph& g);
bool has_triangle(const MultiGraph& g);

// C(G, F): live 4-cycles of free edges whose four vertices all touch a forced edge.
std::vector<uint32_t> unforced_isolated_cycles(const FchcInstance& inst);
// max(n - |F| - |C(G, F)|, 0).
int64_t size_metric(const FchcInstance& inst);

bool is_connected(const MultiGraph& g);
// Connectivity of the graph of live edges.
bool is_connected(const FchcInstance& inst);

// Simple connected cubic graph from the pairing model; deterministic per seed.
MultiGraph random_cubic(uint32_t n, uint64_t seed);

// Exhaustive backtracking: a Hamiltonian cycle over live edges containing
// every forced edge. Two parallel edges form a cycle when n = 2.
bool brute_force_fchc(const FchcInstance& inst, uint32_t limit = 20);

// Connected cubic graphs on n vertices up to isomorphism, optionally only
// triangle-free ones, in a fixed deterministic order.
std::vector<MultiGraph> cubic_corpus(uint32_t n, bool triangle_free = true);
// Canonical code of a connected cubic graph: equal iff isomorphic.
std::vector<uint8_t> cubic_canonical_code(const MultiGraph& g);

// Built-in fixtures: "k4", "k33", "prism", "q3", "petersen".
MultiGraph named_graph(std::string_view name);

}  // namespace hfchc
