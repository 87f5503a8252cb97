#include <doctest.h>

#include <mutex>
#include <set>

#include "coclique/clique.hpp"
#include "coclique/error.hpp"
#include "coclique/quasiclique.hpp"
#include "coclique/synth.hpp"

using namespace coclique;

namespace {

std::set<VertexSet> collect(const Graph& g, const QuasiParams& p, bool maximal,
                            int threads = 1) {
    std::set<VertexSet> out;
    std::mutex mutex;
    size_t emitted = 0;
    const auto sink = [&](const VertexSet& s) {
        std::lock_guard<std::mutex> lock(mutex);
        ++emitted;
        out.insert(s);
    };
    if (maximal)
        maximal_pseudo_cliques(g, p, sink, threads);
    else
        pseudo_cliques(g, p, sink, threads);
    REQUIRE(emitted == out.size()); // no duplicates
    return out;
}

Graph complete_graph(uint32_t n) {
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return Graph::from_edges(n, std::move(edges));
}

Graph complete_minus_one_edge(uint32_t n) {
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j)
            if (!(i == 0 && j == 1)) edges.emplace_back(i, j);
    return Graph::from_edges(n, std::move(edges));
}

QuasiParams params(Rational theta, int min_size,
                   std::optional<int> max_size = std::nullopt) {
    QuasiParams p;
    p.theta = theta;
    p.min_size = min_size;
    p.max_size = max_size;
    return p;
}

// parent(S) drops the minimum-degree vertex, largest id on ties.
VertexSet parent_of(const Graph& g, const VertexSet& s) {
    VertexId drop = s.front();
    uint32_t best_degree = 0;
    bool first = true;
    for (VertexId v : s) {
        uint32_t degree = 0;
        for (VertexId w : s)
            if (w != v && g.has_edge(v, w)) ++degree;
        if (first || degree < best_degree || (degree == best_degree && v > drop)) {
            drop = v;
            best_degree = degree;
            first = false;
        }
    }
    VertexSet parent;
    for (VertexId v : s)
        if (v != drop) parent.push_back(v);
    return parent;
}

} // namespace

TEST_SUITE("quasiclique") {

TEST_CASE("density is exact") {
    CHECK(density(complete_graph(3), {0, 1, 2}) == Rational{1, 1});
    const Graph path3 = Graph::from_edges(3, {{0, 1}, {1, 2}});
    CHECK(density(path3, {0, 1, 2}) == Rational{2, 3});
    CHECK(density(path3, {0}) == Rational{1, 1});
    CHECK(density(path3, {}) == Rational{1, 1});
}

TEST_CASE("K5 minus an edge sits exactly on theta = 0.90") {
    const Graph g = complete_minus_one_edge(5);
    const VertexSet all = {0, 1, 2, 3, 4};
    CHECK(density(g, all) == Rational{9, 10});
    CHECK(density(g, all) >= *Rational::parse("0.90"));
    // K4 minus an edge misses it: 5/6 < 9/10.
    const Graph h = complete_minus_one_edge(4);
    CHECK(density(h, {0, 1, 2, 3}) == Rational{5, 6});
    CHECK_FALSE(density(h, {0, 1, 2, 3}) >= Rational{9, 10});
}

TEST_CASE("theta parses exactly from decimal strings") {
    CHECK(*Rational::parse("0.90") == Rational{9, 10});
    CHECK(*Rational::parse("0.9") == Rational{9, 10});
    CHECK(*Rational::parse("9/10") == Rational{9, 10});
    CHECK(*Rational::parse("1") == Rational{1, 1});
    CHECK(*Rational::parse("1.0") == Rational{1, 1});
    CHECK_FALSE(Rational::parse("-0.5"));
    CHECK_FALSE(Rational::parse("abc"));
}

TEST_CASE("complete K4 at theta 0.9: all 3-subsets and the 4-set") {
    const auto sets = collect(complete_graph(4), params({9, 10}, 3), false);
    CHECK(sets == std::set<VertexSet>{
                      {0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}, {0, 1, 2, 3}});
}

TEST_CASE("K4 minus an edge yields nothing at min_size 4") {
    const auto sets = collect(complete_minus_one_edge(4), params({9, 10}, 4), false);
    CHECK(sets.empty());
}

TEST_CASE("K5 minus an edge is emitted and maximal at the 0.90 boundary") {
    const Graph g = complete_minus_one_edge(5);
    const auto sets = collect(g, params({9, 10}, 5), false);
    CHECK(sets == std::set<VertexSet>{{0, 1, 2, 3, 4}});
    const auto maximal = collect(g, params({9, 10}, 5), true);
    CHECK(maximal == std::set<VertexSet>{{0, 1, 2, 3, 4}});
}

TEST_CASE("only the full K4 is maximal at theta 0.9") {
    const auto maximal = collect(complete_graph(4), params({9, 10}, 3), true);
    CHECK(maximal == std::set<VertexSet>{{0, 1, 2, 3}});
}

TEST_CASE("enumeration equals the exhaustive oracle on random graphs") {
    const std::vector<Rational> thetas = {{4, 5}, {9, 10}, {1, 1}};
    for (uint64_t seed = 1; seed <= 12; ++seed) {
        for (double p : {0.4, 0.6, 0.9}) {
            const uint32_t n = 4 + seed % 7; // 4..10
            const Graph g = random_graph(n, p, seed * 131 + static_cast<int>(p * 10));
            for (const Rational& theta : thetas) {
                const auto qp = params(theta, 2);
                CHECK(collect(g, qp, false) == oracle_pseudo_cliques(g, qp));
                CHECK(collect(g, qp, true) == oracle_maximal_pseudo_cliques(g, qp));
            }
        }
    }
}

TEST_CASE("max_size caps the enumeration without breaking completeness") {
    const Graph g = random_graph(9, 0.7, 17);
    const auto capped = collect(g, params({4, 5}, 2, 4), false);
    CHECK(capped == oracle_pseudo_cliques(g, params({4, 5}, 2, 4)));
    // Maximality still considers extensions beyond the cap.
    const auto capped_maximal = collect(g, params({4, 5}, 2, 4), true);
    CHECK(capped_maximal == oracle_maximal_pseudo_cliques(g, params({4, 5}, 2, 4)));
}

TEST_CASE("theta = 1 enumerates exactly the cliques of qualifying size") {
    for (uint64_t seed : {2u, 9u, 14u}) {
        const Graph g = random_graph(9, 0.55, seed);
        // All cliques (not only maximal) of size in [2, n], derived from
        // the clique module by expanding maximal cliques to subsets.
        std::set<VertexSet> expected;
        std::mutex mutex;
        maximal_cliques(g, {1, 1}, [&](const VertexSet& c) {
            std::lock_guard<std::mutex> lock(mutex);
            const size_t m = c.size();
            for (uint32_t bits = 1; bits < (1u << m); ++bits) {
                VertexSet subset;
                for (size_t i = 0; i < m; ++i)
                    if (bits & (1u << i)) subset.push_back(c[i]);
                if (subset.size() >= 2) expected.insert(subset);
            }
        });
        CHECK(collect(g, params({1, 1}, 2), false) == expected);
    }
}

TEST_CASE("every emitted set is dense and its parent is dense too") {
    const Graph g = random_graph(12, 0.5, 33);
    const auto qp = params({4, 5}, 3);
    const auto sets = collect(g, qp, false);
    for (const auto& s : sets) {
        CHECK(density(g, s) >= qp.theta);
        if (static_cast<int>(s.size()) > 2) {
            const auto parent = parent_of(g, s);
            CHECK(density(g, parent) >= density(g, s));
            CHECK(density(g, parent) >= qp.theta);
        }
    }
}

TEST_CASE("parallel enumeration equals sequential") {
    const Graph g = random_graph(12, 0.6, 55);
    const auto qp = params({9, 10}, 3);
    CHECK(collect(g, qp, false, 4) == collect(g, qp, false, 1));
    CHECK(collect(g, qp, true, 4) == collect(g, qp, true, 1));
}

TEST_CASE("histograms count maximal pseudo-cliques by exact size") {
    CHECK(quasiclique_size_histogram(complete_graph(4), params({9, 10}, 3)) ==
          std::map<int, uint64_t>{{4, 1}});

    // Two disjoint K5-minus-an-edge components.
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (uint32_t base : {0u, 5u})
        for (uint32_t i = 0; i < 5; ++i)
            for (uint32_t j = i + 1; j < 5; ++j)
                if (!(i == 0 && j == 1)) edges.emplace_back(base + i, base + j);
    const Graph two = Graph::from_edges(10, std::move(edges));
    CHECK(quasiclique_size_histogram(two, params({9, 10}, 5)) ==
          std::map<int, uint64_t>{{5, 2}});
}

TEST_CASE("planted dense group sets the histogram's top size") {
    // K9 minus one edge (density 35/36) planted over sparse noise.
    std::vector<std::pair<VertexId, VertexId>> edges;
    const Graph noise = random_graph(13, 0.15, 321);
    for (VertexId v = 0; v < 13; ++v)
        for (VertexId w : noise.neighbors(v))
            if (v < w) edges.emplace_back(v, w);
    for (VertexId i = 0; i < 9; ++i)
        for (VertexId j = i + 1; j < 9; ++j)
            if (!(i == 0 && j == 1)) edges.emplace_back(i, j);
    const Graph g = Graph::from_edges(13, std::move(edges));

    const auto qp = params({9, 10}, 5);
    const auto histogram = quasiclique_size_histogram(g, qp);
    std::map<int, uint64_t> expected;
    for (const auto& s : oracle_maximal_pseudo_cliques(g, qp))
        ++expected[static_cast<int>(s.size())];
    CHECK(histogram == expected);
    REQUIRE(!histogram.empty());
    CHECK(histogram.rbegin()->first == 9);
}

TEST_CASE("a disconnected vertex can join a large dense set") {
    // K9 plus an isolated vertex: the 10-set has density 36/45 = 4/5, so
    // at theta 0.8 the isolated vertex is a valid extension even with no
    // edges into the set.
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (uint32_t i = 0; i < 9; ++i)
        for (uint32_t j = i + 1; j < 9; ++j) edges.emplace_back(i, j);
    const Graph g = Graph::from_edges(10, std::move(edges));

    const VertexSet all = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(density(g, all) == Rational{4, 5});

    const auto sets = collect(g, params({4, 5}, 10), false);
    CHECK(sets == std::set<VertexSet>{all});
    CHECK(sets == oracle_pseudo_cliques(g, params({4, 5}, 10)));
    // The K9 itself is therefore not maximal at theta 0.8.
    const auto maximal9 = collect(g, params({4, 5}, 9, 9), true);
    CHECK(maximal9.empty());
}

TEST_CASE("parameter validation") {
    const Graph g = complete_graph(3);
    const auto sink = [](const VertexSet&) {};
    CHECK_THROWS_AS(pseudo_cliques(g, params({0, 1}, 2), sink), Error);
    CHECK_THROWS_AS(pseudo_cliques(g, params({11, 10}, 2), sink), Error);
    CHECK_THROWS_AS(pseudo_cliques(g, params({1, 2}, 1), sink), Error);
    CHECK_THROWS_AS(pseudo_cliques(g, params({1, 2}, 4, 3), sink), Error);
}

} // TEST_SUITE
