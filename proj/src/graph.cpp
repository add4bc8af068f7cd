#include "hfchc/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "hfchc/errors.hpp"

namespace hfchc {

MultiGraph::MultiGraph(uint32_t n) : inc_(n), deg_(n, 0) {}

uint32_t MultiGraph::add_edge(uint32_t u, uint32_t v) {
    if (u >= n() || v >= n()) throw std::out_of_range("add_edge: vertex out of range");
    if (u == v) throw SelfLoop("self-loop at vertex " + std::to_string(u + 1));
    for (uint32_t x : {u, v})
        if (deg_[x] == 3) throw DegreeExceeded("vertex " + std::to_string(x + 1) + " already has degree 3");
    const uint32_t e = m();
    edges_.push_back({u, v});
    inc_[u][deg_[u]++] = e;
    inc_[v][deg_[v]++] = e;
    return e;
}

bool MultiGraph::is_cubic() const {
    return std::all_of(deg_.begin(), deg_.end(), [](uint8_t d) { return d == 3; });
}

bool MultiGraph::has_parallel_edges() const {
    for (uint32_t v = 0; v < n(); ++v)
        for (uint32_t a = 0; a < deg_[v]; ++a)
            for (uint32_t b = a + 1; b < deg_[v]; ++b)
                if (edges_[inc_[v][a]].other(v) == edges_[inc_[v][b]].other(v)) return true;
    return false;
}

std::vector<FourCycle> four_cycles(const MultiGraph& g) {
    std::vector<FourCycle> out;
    for (uint32_t v0 = 0; v0 < g.n(); ++v0) {
        for (uint32_t e0 : g.incident(v0)) {
            const uint32_t v1 = g.edge(e0).other(v0);
            if (v1 < v0) continue;
            for (uint32_t e1 : g.incident(v1)) {
                const uint32_t v2 = g.edge(e1).other(v1);
                if (e1 == e0 || v2 <= v0 || v2 == v1) continue;
                for (uint32_t e2 : g.incident(v2)) {
                    const uint32_t v3 = g.edge(e2).other(v2);
                    // v1 < v3 picks one of the two traversal directions.
                    if (e2 == e1 || v3 <= v1 || v3 == v2) continue;
                    for (uint32_t e3 : g.incident(v3))
                        if (e3 != e2 && g.edge(e3).other(v3) == v0) out.push_back({{v0, v1, v2, v3}, {e0, e1, e2, e3}});
                }
            }
        }
    }
    return out;
}

GraphData::GraphData(MultiGraph graph) : g(std::move(graph)), cycles(four_cycles(g)), cycles_of_edge(g.m()) {
    for (uint32_t c = 0; c < cycles.size(); ++c)
        for (uint32_t e : cycles[c].e) cycles_of_edge[e].push_back(c);
}

FchcInstance::FchcInstance(MultiGraph g, std::span<const uint32_t> forced)
    : FchcInstance(std::make_shared<const GraphData>(std::move(g))) {
    for (uint32_t e : forced) force(e);
}

FchcInstance::FchcInstance(std::shared_ptr<const GraphData> data)
    : data_(std::move(data)), state_(data_->g.m(), EdgeState::Free) {}

void FchcInstance::force(uint32_t e) {
    if (state_.at(e) == EdgeState::Deleted) throw std::logic_error("force: edge is deleted");
    state_[e] = EdgeState::Forced;
}

void FchcInstance::remove(uint32_t e) {
    if (state_.at(e) == EdgeState::Forced) throw std::logic_error("remove: edge is forced");
    state_[e] = EdgeState::Deleted;
}

uint32_t FchcInstance::live_degree(uint32_t v) const {
    uint32_t d = 0;
    for (uint32_t e : graph().incident(v)) d += live(e);
    return d;
}

uint32_t FchcInstance::forced_degree(uint32_t v) const {
    uint32_t d = 0;
    for (uint32_t e : graph().incident(v)) d += forced(e);
    return d;
}

uint32_t FchcInstance::forced_count() const {
    return static_cast<uint32_t>(std::count(state_.begin(), state_.end(), EdgeState::Forced));
}

std::vector<uint32_t> FchcInstance::forced_edges() const {
    std::vector<uint32_t> out;
    for (uint32_t e = 0; e < m(); ++e)
        if (forced(e)) out.push_back(e);
    return out;
}

std::vector<uint32_t> FchcInstance::deleted_edges() const {
    std::vector<uint32_t> out;
    for (uint32_t e = 0; e < m(); ++e)
        if (state_[e] == EdgeState::Deleted) out.push_back(e);
    return out;
}

ParsedGraph parse_graph(std::string_view text) {
    ParsedGraph out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool header = false;
    uint64_t declared_m = 0;
    std::vector<bool> seen_forced;
    std::vector<std::pair<uint64_t, int>> forced_raw;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == 'c') continue;
        auto field = [&](const char* what) {
            int64_t x = 0;
            if (!(ls >> x) || x < 0) throw ParseError(lineno, std::string("expected ") + what);
            return static_cast<uint64_t>(x);
        };
        if (tag == "p") {
            if (header) throw ParseError(lineno, "duplicate header");
            const uint64_t n = field("vertex count");
            declared_m = field("edge count");
            if (n > (1u << 24)) throw ParseError(lineno, "vertex count too large");
            out.g = MultiGraph(static_cast<uint32_t>(n));
            header = true;
        } else if (tag == "e") {
            if (!header) throw ParseError(lineno, "edge before header");
            const uint64_t u = field("endpoint"), v = field("endpoint");
            if (u < 1 || v < 1 || u > out.g.n() || v > out.g.n()) throw ParseError(lineno, "endpoint out of range");
            if (out.g.m() == declared_m) throw ParseError(lineno, "more edges than declared");
            out.g.add_edge(static_cast<uint32_t>(u - 1), static_cast<uint32_t>(v - 1));
        } else if (tag == "f") {
            if (!header) throw ParseError(lineno, "forced edge before header");
            forced_raw.push_back({field("edge index"), lineno});
        } else {
            throw ParseError(lineno, "unknown line type '" + tag + "'");
        }
        std::string extra;
        if (ls >> extra) throw ParseError(lineno, "trailing tokens");
    }
    if (!header) throw ParseError(lineno, "missing header");
    if (out.g.m() != declared_m) throw ParseError(lineno, "fewer edges than declared");
    seen_forced.assign(out.g.m(), false);
    for (auto [idx, at] : forced_raw) {
        if (idx < 1 || idx > out.g.m()) throw ParseError(at, "forced edge index out of range");
        if (seen_forced[idx - 1]) throw ParseError(at, "edge forced twice");
        seen_forced[idx - 1] = true;
        out.forced.push_back(static_cast<uint32_t>(idx - 1));
    }
    return out;
}

ParsedGraph read_graph_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_graph(ss.str());
}

std::string serialize_graph(const MultiGraph& g, std::span<const uint32_t> forced) {
    std::ostringstream out;
    out << "p " << g.n() << ' ' << g.m() << '\n';
    for (const Edge& e : g.edges()) out << "e " << e.u + 1 << ' ' << e.v + 1 << '\n';
    for (uint32_t e : forced) out << "f " << e + 1 << '\n';
    return out.str();
}

namespace {

bool adjacent(const MultiGraph& g, uint32_t a, uint32_t b) {
    for (uint32_t e : g.incident(a))
        if (g.edge(e).other(a) == b) return true;
    return false;
}

// First triangle (a < b < c) in vertex order, or false.
bool find_triangle(const MultiGraph& g, std::array<uint32_t, 3>& t) {
    for (uint32_t a = 0; a < g.n(); ++a)
        for (uint32_t e1 : g.incident(a)) {
            const uint32_t b = g.edge(e1).other(a);
            if (b <= a) continue;
            for (uint32_t e2 : g.incident(b)) {
                const uint32_t c = g.edge(e2).other(b);
                if (c > b && adjacent(g, a, c)) {
                    t = {a, b, c};
                    return true;
                }
            }
        }
    return false;
}

MultiGraph contract_one(const MultiGraph& g, const std::array<uint32_t, 3>& t) {
    // The merged vertex takes the slot of t[0]; later vertices shift down.
    std::vector<uint32_t> relabel(g.n());
    uint32_t next = 0;
    for (uint32_t v = 0; v < g.n(); ++v) {
        if (v == t[1] || v == t[2]) continue;
        relabel[v] = next++;
    }
    relabel[t[1]] = relabel[t[2]] = relabel[t[0]];
    auto inside = [&](uint32_t v) { return v == t[0] || v == t[1] || v == t[2]; };
    MultiGraph out(next);
    for (const Edge& e : g.edges()) {
        if (inside(e.u) && inside(e.v)) continue;
        out.add_edge(relabel[e.u], relabel[e.v]);
    }
    return out;
}

}  // namespace

bool has_triangle(const MultiGraph& g) {
    std::array<uint32_t, 3> t;
    return find_triangle(g, t);
}

MultiGraph contract_triangles(const MultiGraph& g) {
    MultiGraph cur = g;
    std::array<uint32_t, 3> t;
    while (cur.n() >= 4 && find_triangle(cur, t)) cur = contract_one(cur, t);
    return cur;
}

std::vector<uint32_t> unforced_isolated_cycles(const FchcInstance& inst) {
    std::vector<uint32_t> out;
    const auto& cycles = inst.data().cycles;
    for (uint32_t c = 0; c < cycles.size(); ++c) {
        const FourCycle& w = cycles[c];
        bool ok = std::all_of(w.e.begin(), w.e.end(), [&](uint32_t e) { return inst.free(e); });
        for (uint32_t k = 0; ok && k < 4; ++k) ok = inst.forced_degree(w.v[k]) > 0;
        if (ok) out.push_back(c);
    }
    return out;
}

int64_t size_metric(const FchcInstance& inst) {
    const int64_t s = int64_t(inst.n()) - int64_t(inst.forced_count()) - int64_t(unforced_isolated_cycles(inst).size());
    return std::max<int64_t>(s, 0);
}

namespace {

template <class Live>
bool connected_by(const MultiGraph& g, Live live) {
    if (g.n() == 0) return true;
    std::vector<bool> seen(g.n(), false);
    std::vector<uint32_t> stack{0};
    seen[0] = true;
    uint32_t reached = 1;
    while (!stack.empty()) {
        const uint32_t v = stack.back();
        stack.pop_back();
        for (uint32_t e : g.incident(v)) {
            if (!live(e)) continue;
            const uint32_t w = g.edge(e).other(v);
            if (!seen[w]) {
                seen[w] = true;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    return reached == g.n();
}

}  // namespace

bool is_connected(const MultiGraph& g) {
    return connected_by(g, [](uint32_t) { return true; });
}

bool is_connected(const FchcInstance& inst) {
    return connected_by(inst.graph(), [&](uint32_t e) { return inst.live(e); });
}

MultiGraph random_cubic(uint32_t n, uint64_t seed) {
    if (n < 4 || n % 2) throw GenerationFailed("random_cubic: n must be even and at least 4");
    std::mt19937_64 rng(seed);
    std::vector<uint32_t> points(3 * n);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        std::iota(points.begin(), points.end(), 0u);
        std::shuffle(points.begin(), points.end(), rng);
        std::vector<std::pair<uint32_t, uint32_t>> pairs;
        bool simple = true;
        for (size_t k = 0; simple && k < points.size(); k += 2) {
            uint32_t a = points[k] / 3, b = points[k + 1] / 3;
            if (a == b) simple = false;
            if (a > b) std::swap(a, b);
            pairs.push_back({a, b});
        }
        if (!simple) continue;
        std::sort(pairs.begin(), pairs.end());
        if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) continue;
        MultiGraph g(n);
        for (auto [a, b] : pairs) g.add_edge(a, b);
        if (is_connected(g)) return g;
    }
    throw GenerationFailed("random_cubic: retries exhausted");
}

namespace {

struct HamSearch {
    const FchcInstance& inst;
    const MultiGraph& g;
    uint32_t forced_total;
    std::vector<bool> on_path;
    uint32_t first_edge = 0;

    // Path currently ends at v via edge `in`, has `len` vertices and uses
    // `forced_used` forced edges.
    bool extend(uint32_t v, uint32_t in, uint32_t len, uint32_t forced_used) {
        const uint32_t n = g.n();
        if (len == n) {
            for (uint32_t e : g.incident(v))
                if (e != in && e != first_edge && inst.live(e) && g.edge(e).other(v) == 0 &&
                    forced_used + inst.forced(e) == forced_total)
                    return true;
            return false;
        }
        // A forced edge other than the incoming one must be the outgoing one.
        int must = -1;
        for (uint32_t e : g.incident(v))
            if (e != in && inst.forced(e)) {
                if (must >= 0) return false;
                must = int(e);
            }
        for (uint32_t e : g.incident(v)) {
            if (e == in || !inst.live(e) || (must >= 0 && e != uint32_t(must))) continue;
            const uint32_t w = g.edge(e).other(v);
            if (on_path[w]) continue;
            on_path[w] = true;
            const bool ok = extend(w, e, len + 1, forced_used + inst.forced(e));
            on_path[w] = false;
            if (ok) return true;
        }
        return false;
    }
};

}  // namespace

bool brute_force_fchc(const FchcInstance& inst, uint32_t limit) {
    const MultiGraph& g = inst.graph();
    const uint32_t n = g.n();
    if (n > limit) throw OracleLimitExceeded("brute force: n = " + std::to_string(n) + " exceeds limit " + std::to_string(limit));
    if (n <= 1) return false;
    uint32_t live = 0;
    for (uint32_t e = 0; e < g.m(); ++e) live += inst.live(e);
    if (n == 2) return live >= 2 && inst.forced_count() <= 2;
    for (uint32_t v = 0; v < n; ++v)
        if (inst.forced_degree(v) > 2 || inst.live_degree(v) < 2) return false;

    HamSearch h{inst, g, inst.forced_count(), std::vector<bool>(n, false)};
    h.on_path[0] = true;
    // Orient the cycle so that it leaves vertex 0 along a forced edge if it has one.
    int forced_at_0 = -1;
    for (uint32_t e : g.incident(0))
        if (inst.forced(e)) forced_at_0 = int(e);
    for (uint32_t e : g.incident(0)) {
        if (!inst.live(e) || (forced_at_0 >= 0 && e != uint32_t(forced_at_0))) continue;
        const uint32_t w = g.edge(e).other(0);
        h.first_edge = e;
        h.on_path[w] = true;
        const bool ok = h.extend(w, e, 2, inst.forced(e));
        h.on_path[w] = false;
        if (ok) return true;
    }
    return false;
}

MultiGraph named_graph(std::string_view name) {
    auto build = [](uint32_t n, std::initializer_list<std::pair<uint32_t, uint32_t>> es) {
        MultiGraph g(n);
        for (auto [a, b] : es) g.add_edge(a, b);
        return g;
    };
    if (name == "k4") return build(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    if (name == "k33") return build(6, {{0, 3}, {0, 4}, {0, 5}, {1, 3}, {1, 4}, {1, 5}, {2, 3}, {2, 4}, {2, 5}});
    if (name == "prism") return build(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {0, 3}, {1, 4}, {2, 5}});
    if (name == "q3") {
        MultiGraph g(8);
        for (uint32_t v = 0; v < 8; ++v)
            for (uint32_t bit : {1u, 2u, 4u})
                if (v < (v ^ bit)) g.add_edge(v, v ^ bit);
        return g;
    }
    if (name == "petersen") {
        MultiGraph g(10);
        for (uint32_t i = 0; i < 5; ++i) g.add_edge(i, (i + 1) % 5);
        for (uint32_t i = 0; i < 5; ++i) g.add_edge(i, i + 5);
        for (uint32_t i = 0; i < 5; ++i) g.add_edge(i + 5, (i + 2) % 5 + 5);
        return g;
    }
    throw Error("unknown graph name '" + std::string(name) + "'");
}

}  // namespace hfchc
