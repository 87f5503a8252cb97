#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "coclique/graph.hpp"

namespace coclique {

struct CliqueOptions {
    int min_size = 1;
    // Outer degeneracy-order roots run in parallel when > 1; the visitor
    // must then be thread-safe. Enumeration output is order-insensitive.
    int threads = 1;
};

using VertexSetVisitor = std::function<void(const VertexSet&)>;

// Emits every maximal clique of g with |C| >= min_size exactly once, as a
// sorted VertexSet. Bron–Kerbosch with pivoting (pivot maximizes |P ∩ N|,
// ties to the smallest id) over a degeneracy ordering; branches with
// |R| + |P| < min_size are pruned.
void maximal_cliques(const Graph& g, const CliqueOptions& options,
                     const VertexSetVisitor& visit);

// Vertex ordering from repeated minimum-degree removal (ties to the
// smallest id). Exposed for tests.
std::vector<VertexId> degeneracy_order(const Graph& g);

// Count of maximal cliques per exact size.
std::map<int, uint64_t> clique_size_histogram(const Graph& g,
                                              const CliqueOptions& options);

} // namespace coclique
