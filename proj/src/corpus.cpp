// Orderly enumeration of connected cubic graphs. Vertices are generated in
// BFS order: vertex v only ever links to already-discovered vertices above it
// or to the next undiscovered one, so every labeled graph produced is
// connected, and isomorphism classes are separated by a canonical code.

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "hfchc/errors.hpp"
#include "hfchc/graph.hpp"

namespace hfchc {

namespace {

using Adj = std::vector<std::array<uint32_t, 3>>;

// Minimum, over roots and BFS labelings, of the per-vertex sorted neighbor
// labels listed in label order.
class Canonizer {
public:
    explicit Canonizer(const Adj& adj) : adj_(adj), n_(uint32_t(adj.size())) {}

    std::vector<uint8_t> run() {
        for (uint32_t r = 0; r < n_; ++r) {
            std::vector<int> lab(n_, -1);
            std::vector<uint32_t> order{r};
            lab[r] = 0;
            rec(lab, order, 0);
        }
        return best_;
    }

private:
    // The first `head` vertices of `order` have all neighbors labeled, so
    // their part of the code is final; a branch that is already worse than
    // the best code on that prefix cannot win.
    bool prefix_worse(const std::vector<int>& lab, const std::vector<uint32_t>& order, size_t head) const {
        if (best_.empty()) return false;
        for (size_t i = 0; i < head; ++i) {
            const uint32_t v = order[i];
            std::array<int, 3> t{lab[adj_[v][0]], lab[adj_[v][1]], lab[adj_[v][2]]};
            std::sort(t.begin(), t.end());
            for (size_t k = 0; k < 3; ++k) {
                if (t[k] != best_[3 * i + k]) return t[k] > best_[3 * i + k];
            }
        }
        return false;
    }

    void rec(std::vector<int>& lab, std::vector<uint32_t>& order, size_t head) {
        if (prefix_worse(lab, order, head)) return;
        if (order.size() == n_) {
            std::vector<uint8_t> code;
            code.reserve(3 * n_);
            for (uint32_t v : order) {
                std::array<int, 3> t{lab[adj_[v][0]], lab[adj_[v][1]], lab[adj_[v][2]]};
                std::sort(t.begin(), t.end());
                for (int x : t) code.push_back(uint8_t(x));
            }
            if (best_.empty() || code < best_) best_ = std::move(code);
            return;
        }
        for (; head < order.size(); ++head) {
            const uint32_t v = order[head];
            std::vector<uint32_t> un;
            for (uint32_t w : adj_[v])
                if (lab[w] < 0) un.push_back(w);
            if (un.empty()) continue;
            std::sort(un.begin(), un.end());
            do {
                for (uint32_t u : un) {
                    lab[u] = int(order.size());
                    order.push_back(u);
                }
                rec(lab, order, head + 1);
                for (size_t k = 0; k < un.size(); ++k) {
                    lab[order.back()] = -1;
                    order.pop_back();
                }
            } while (std::next_permutation(un.begin(), un.end()));
            return;
        }
    }

    const Adj& adj_;
    uint32_t n_;
    std::vector<uint8_t> best_;
};

class Enumerator {
public:
    Enumerator(uint32_t n, bool triangle_free) : n_(n), tf_(triangle_free), adj_(n), deg_(n, 0) {}

    std::map<std::vector<uint8_t>, Adj> run() {
        if (n_ >= 4 && n_ % 2 == 0) rec(0, 1);
        return std::move(found_);
    }

private:
    bool adj(uint32_t a, uint32_t b) const {
        for (uint32_t k = 0; k < deg_[a]; ++k)
            if (adj_[a][k] == b) return true;
        return false;
    }
    bool common(uint32_t a, uint32_t b) const {
        for (uint32_t k = 0; k < deg_[a]; ++k)
            if (adj(adj_[a][k], b)) return true;
        return false;
    }

    void rec(uint32_t v, uint32_t next) {
        if (v == n_) {
            if (next == n_) found_.try_emplace(Canonizer(adj_).run(), adj_);
            return;
        }
        if (deg_[v] == 3) return rec(v + 1, next);
        if (v >= next) return;
        // Partners above v are added in increasing order to avoid repeats.
        uint32_t from = v + 1;
        for (uint32_t k = 0; k < deg_[v]; ++k)
            if (adj_[v][k] > v) from = std::max(from, adj_[v][k] + 1);
        for (uint32_t w = from; w <= next && w < n_; ++w) {
            if (deg_[w] >= 3 || adj(v, w) || (tf_ && common(v, w))) continue;
            adj_[v][deg_[v]++] = w;
            adj_[w][deg_[w]++] = v;
            rec(v, w == next ? next + 1 : next);
            --deg_[v];
            --deg_[w];
        }
    }

    uint32_t n_;
    bool tf_;
    Adj adj_;
    std::vector<uint32_t> deg_;
    std::map<std::vector<uint8_t>, Adj> found_;
};

MultiGraph from_adj(const Adj& adj) {
    MultiGraph g(uint32_t(adj.size()));
    for (uint32_t v = 0; v < adj.size(); ++v)
        for (uint32_t w : adj[v])
            if (v < w) g.add_edge(v, w);
    return g;
}

}  // namespace

std::vector<uint8_t> cubic_canonical_code(const MultiGraph& g) {
    if (!g.is_cubic() || g.has_parallel_edges()) throw Error("canonical code needs a simple cubic graph");
    Adj adj(g.n());
    for (uint32_t v = 0; v < g.n(); ++v)
        for (uint32_t k = 0; k < 3; ++k) adj[v][k] = g.edge(g.incident(v)[k]).other(v);
    return Canonizer(adj).run();
}

std::vector<MultiGraph> cubic_corpus(uint32_t n, bool triangle_free) {
    static std::mutex mu;
    static std::map<std::pair<uint32_t, bool>, std::vector<MultiGraph>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find({n, triangle_free});
    if (it != cache.end()) return it->second;
    std::vector<MultiGraph> out;
    for (const auto& [code, adj] : Enumerator(n, triangle_free).run()) out.push_back(from_adj(adj));
    cache.emplace(std::make_pair(n, triangle_free), out);
    return out;
}

}  // namespace hfchc
