#include <doctest.h>

#include <mutex>
#include <set>

#include "coclique/clique.hpp"
#include "coclique/synth.hpp"

using namespace coclique;

namespace {

std::set<VertexSet> collect(const Graph& g, int min_size, int threads = 1) {
    std::set<VertexSet> out;
    std::mutex mutex;
    size_t emitted = 0;
    maximal_cliques(g, {min_size, threads}, [&](const VertexSet& s) {
        std::lock_guard<std::mutex> lock(mutex);
        ++emitted;
        out.insert(s);
    });
    // Set insertion silently collapses duplicates; count them instead.
    REQUIRE(emitted == out.size());
    return out;
}

Graph complete_graph(uint32_t n) {
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return Graph::from_edges(n, std::move(edges));
}

Graph cycle_graph(uint32_t n) {
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (uint32_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return Graph::from_edges(n, std::move(edges));
}

} // namespace

TEST_SUITE("clique") {

TEST_CASE("complete graph has exactly one maximal clique") {
    const auto cliques = collect(complete_graph(5), 1);
    CHECK(cliques == std::set<VertexSet>{{0, 1, 2, 3, 4}});
}

TEST_CASE("five-cycle: the edges are the maximal cliques") {
    const auto cliques = collect(cycle_graph(5), 2);
    CHECK(cliques == std::set<VertexSet>{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
}

TEST_CASE("empty and edgeless graphs") {
    CHECK(collect(Graph(), 1).empty());
    const Graph isolated = Graph::from_edges(3, {});
    // Each isolated vertex is a maximal 1-clique.
    CHECK(collect(isolated, 1) == std::set<VertexSet>{{0}, {1}, {2}});
    CHECK(collect(isolated, 2).empty());
}

TEST_CASE("degeneracy order removes a minimum-degree vertex each step") {
    const Graph g = random_graph(30, 0.3, 99);
    const auto order = degeneracy_order(g);
    REQUIRE(order.size() == 30);
    std::set<VertexId> remaining(order.begin(), order.end());
    REQUIRE(remaining.size() == 30);
    for (VertexId v : order) {
        uint32_t v_degree = 0;
        for (VertexId w : g.neighbors(v)) v_degree += remaining.count(w);
        for (VertexId u : remaining) {
            uint32_t u_degree = 0;
            for (VertexId w : g.neighbors(u)) u_degree += remaining.count(w);
            CHECK(v_degree <= u_degree);
        }
        remaining.erase(v);
    }
}

TEST_CASE("output matches the exhaustive oracle on random graphs") {
    int checked = 0;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        for (double p : {0.3, 0.5, 0.8}) {
            const uint32_t n = 5 + seed % 8; // 5..12
            const Graph g = random_graph(n, p, seed * 1000 + static_cast<int>(p * 10));
            CHECK(collect(g, 1) == oracle_maximal_cliques(g, 1));
            ++checked;
        }
    }
    CHECK(checked == 60);
}

TEST_CASE("emitted sets are cliques, maximal, and cover every edge") {
    for (uint64_t seed : {3u, 7u, 12u}) {
        const Graph g = random_graph(24, 0.35, seed);
        const auto cliques = collect(g, 2);
        uint64_t covered = 0;
        std::set<std::pair<VertexId, VertexId>> edges_seen;
        for (const auto& c : cliques) {
            CHECK(is_clique(g, c));
            // Maximality: no outside vertex adjacent to every member.
            for (VertexId u = 0; u < g.vertex_count(); ++u) {
                if (std::binary_search(c.begin(), c.end(), u)) continue;
                bool adjacent_to_all = true;
                for (VertexId w : c)
                    if (!g.has_edge(u, w)) {
                        adjacent_to_all = false;
                        break;
                    }
                CHECK_FALSE(adjacent_to_all);
            }
            for (size_t i = 0; i < c.size(); ++i)
                for (size_t j = i + 1; j < c.size(); ++j)
                    edges_seen.insert({c[i], c[j]});
        }
        covered = edges_seen.size();
        CHECK(covered == g.edge_count());
    }
}

TEST_CASE("min_size pruning equals filtering") {
    const Graph g = random_graph(18, 0.5, 5);
    const auto all = collect(g, 1);
    for (int min_size : {2, 3, 4, 5}) {
        std::set<VertexSet> filtered;
        for (const auto& c : all)
            if (static_cast<int>(c.size()) >= min_size) filtered.insert(c);
        CHECK(collect(g, min_size) == filtered);
    }
}

TEST_CASE("parallel enumeration equals sequential") {
    const Graph g = random_graph(40, 0.3, 21);
    CHECK(collect(g, 2, 4) == collect(g, 2, 1));
}

TEST_CASE("size histogram: complete graph and disjoint triangles") {
    CHECK(clique_size_histogram(complete_graph(5), {1, 1}) ==
          std::map<int, uint64_t>{{5, 1}});
    const Graph two_triangles =
        Graph::from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
    CHECK(clique_size_histogram(two_triangles, {1, 1}) ==
          std::map<int, uint64_t>{{3, 2}});
}

TEST_CASE("planted 10-clique dominates the histogram") {
    // Sparse background on 14 vertices plus a planted K10; the subset
    // oracle confirms the exact histogram.
    std::vector<std::pair<VertexId, VertexId>> edges;
    const Graph noise = random_graph(14, 0.2, 2024);
    for (VertexId v = 0; v < 14; ++v)
        for (VertexId w : noise.neighbors(v))
            if (v < w) edges.emplace_back(v, w);
    for (VertexId i = 0; i < 10; ++i)
        for (VertexId j = i + 1; j < 10; ++j) edges.emplace_back(i, j);
    const Graph g = Graph::from_edges(14, std::move(edges));

    const auto histogram = clique_size_histogram(g, {1, 1});
    const auto oracle = oracle_maximal_cliques(g, 1);
    std::map<int, uint64_t> expected;
    for (const auto& c : oracle) ++expected[static_cast<int>(c.size())];
    CHECK(histogram == expected);
    CHECK(histogram.rbegin()->first == 10);
    CHECK(histogram.rbegin()->second >= 1);
}

} // TEST_SUITE
