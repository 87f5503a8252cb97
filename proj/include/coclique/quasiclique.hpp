#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "coclique/clique.hpp"
#include "coclique/graph.hpp"
#include "coclique/rational.hpp"

namespace coclique {

struct QuasiParams {
    // Edge-density threshold in (0,1]; exact rational, never a float.
    Rational theta{9, 10};
    int min_size = 7;
    std::optional<int> max_size;
};

// |E(G[s])| over |s|*(|s|-1)/2, exact; 1 by convention when |s| <= 1.
Rational density(const Graph& g, const VertexSet& s);

// Emits every vertex set S with min_size <= |S| <= max_size and
// density(S) >= theta, each exactly once.
//
// Reverse search: parent(S) drops the minimum-degree vertex of G[S]
// (ties to the largest id). Removing a minimum-degree vertex never lowers
// density, so parents are pseudo-cliques too and the parent relation forms
// a tree rooted at singletons; DFS keeps exactly the extensions whose
// parent is the current set. Subtrees of distinct singleton roots run in
// parallel when threads > 1 (thread-safe visitor required).
void pseudo_cliques(const Graph& g, const QuasiParams& params,
                    const VertexSetVisitor& visit, int threads = 1);

// The subset of pseudo_cliques output with no single-vertex extension of
// density >= theta (checked against the whole vertex set, ignoring
// max_size).
void maximal_pseudo_cliques(const Graph& g, const QuasiParams& params,
                            const VertexSetVisitor& visit, int threads = 1);

// Count of maximal pseudo-cliques per exact size.
std::map<int, uint64_t> quasiclique_size_histogram(const Graph& g,
                                                   const QuasiParams& params,
                                                   int threads = 1);

} // namespace coclique
