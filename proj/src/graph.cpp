#include "coclique/graph.hpp"

#include <algorithm>
#include <tuple>

#include "coclique/error.hpp"

namespace coclique {

Graph Graph::from_edges(uint32_t n, std::vector<std::pair<VertexId, VertexId>> edges) {
    return from_weighted_edges(n, std::move(edges), {});
}

Graph Graph::from_weighted_edges(uint32_t n,
                                 std::vector<std::pair<VertexId, VertexId>> edges,
                                 std::vector<uint32_t> weights) {
    const bool weighted = !weights.empty();
    if (weighted && weights.size() != edges.size())
        throw Error("graph: weights must align with edges");

    struct Arc {
        VertexId from, to;
        uint32_t weight;
    };
    std::vector<Arc> arcs;
    arcs.reserve(edges.size() * 2);
    for (size_t i = 0; i < edges.size(); ++i) {
        auto [u, v] = edges[i];
        if (u == v) throw Error("graph: self-loop rejected");
        if (u >= n || v >= n) throw Error("graph: vertex id out of range");
        const uint32_t w = weighted ? weights[i] : 0;
        arcs.push_back({u, v, w});
        arcs.push_back({v, u, w});
    }
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
        return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });
    arcs.erase(std::unique(arcs.begin(), arcs.end(),
                           [](const Arc& a, const Arc& b) {
                               return a.from == b.from && a.to == b.to;
                           }),
               arcs.end());

    Graph g;
    g.n_ = n;
    g.offsets_.assign(n + 1, 0);
    for (const Arc& a : arcs) ++g.offsets_[a.from + 1];
    for (uint32_t v = 0; v < n; ++v) g.offsets_[v + 1] += g.offsets_[v];
    g.neighbors_.resize(arcs.size());
    if (weighted) g.weights_.resize(arcs.size());
    for (size_t i = 0; i < arcs.size(); ++i) {
        g.neighbors_[i] = arcs[i].to;
        if (weighted) g.weights_[i] = arcs[i].weight;
    }
    return g;
}

bool Graph::has_edge(VertexId u, VertexId v) const {
    if (u >= n_ || v >= n_ || u == v) return false;
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

uint32_t Graph::edge_weight(VertexId u, VertexId v) const {
    auto nb = neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), v);
    if (it == nb.end() || *it != v) throw Error("graph: edge_weight on missing edge");
    if (weights_.empty()) return 1;
    return weights_[offsets_[u] + (it - nb.begin())];
}

bool is_clique(const Graph& g, const VertexSet& s) {
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j)
            if (!g.has_edge(s[i], s[j])) return false;
    return true;
}

uint64_t induced_edge_count(const Graph& g, const VertexSet& s) {
    uint64_t m = 0;
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j)
            if (g.has_edge(s[i], s[j])) ++m;
    return m;
}

} // namespace coclique
