#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace coclique {

using VertexId = uint32_t;

// Sorted, strictly increasing vertex ids. The unit of enumeration output.
using VertexSet = std::vector<VertexId>;

// Immutable undirected simple graph over vertices 0..n-1, stored as a CSR
// adjacency with sorted neighbor lists. Optionally edge-weighted; weights
// are stored per directed arc, aligned with the neighbor arrays.
class Graph {
public:
    Graph() = default;

    // Self-loops are rejected; duplicate edges collapse to one.
    static Graph from_edges(uint32_t n, std::vector<std::pair<VertexId, VertexId>> edges);
    static Graph from_weighted_edges(
        uint32_t n, std::vector<std::pair<VertexId, VertexId>> edges,
        std::vector<uint32_t> weights);

    uint32_t vertex_count() const { return n_; }
    uint64_t edge_count() const { return neighbors_.size() / 2; }
    bool weighted() const { return !weights_.empty(); }

    uint32_t degree(VertexId v) const {
        return static_cast<uint32_t>(offsets_[v + 1] - offsets_[v]);
    }
    std::span<const VertexId> neighbors(VertexId v) const {
        return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }
    std::span<const uint32_t> neighbor_weights(VertexId v) const {
        if (weights_.empty()) return {};
        return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    bool has_edge(VertexId u, VertexId v) const;

    // Weight of edge (u,v); 1 for unweighted graphs. Edge must exist.
    uint32_t edge_weight(VertexId u, VertexId v) const;

    bool operator==(const Graph&) const = default;

private:
    uint32_t n_ = 0;
    std::vector<uint64_t> offsets_;   // n+1
    std::vector<VertexId> neighbors_; // sorted within each vertex
    std::vector<uint32_t> weights_;   // aligned with neighbors_, empty if unweighted
};

// True iff every pair in s is adjacent. |s| <= 1 counts as a clique.
bool is_clique(const Graph& g, const VertexSet& s);

// Number of edges of the subgraph induced by s.
uint64_t induced_edge_count(const Graph& g, const VertexSet& s);

} // namespace coclique
