#include "coclique/clique.hpp"

#include <algorithm>
#include <mutex>
#include <queue>

#include "coclique/error.hpp"
#include "coclique/parallel.hpp"

namespace coclique {

std::vector<VertexId> degeneracy_order(const Graph& g) {
    const uint32_t n = g.vertex_count();
    std::vector<uint32_t> degree(n);
    // Lazy min-heap of (current degree, id); stale entries are skipped on
    // pop. Ties go to the smallest id, so the order is deterministic.
    std::priority_queue<std::pair<uint32_t, VertexId>,
                        std::vector<std::pair<uint32_t, VertexId>>, std::greater<>>
        heap;
    for (VertexId v = 0; v < n; ++v) {
        degree[v] = g.degree(v);
        heap.emplace(degree[v], v);
    }
    std::vector<char> removed(n, 0);
    std::vector<VertexId> order;
    order.reserve(n);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (removed[v] || degree[v] != d) continue;
        removed[v] = 1;
        order.push_back(v);
        for (VertexId w : g.neighbors(v)) {
            if (removed[w]) continue;
            --degree[w];
            heap.emplace(degree[w], w);
        }
    }
    return order;
}

namespace {

class BronKerbosch {
public:
    BronKerbosch(const Graph& g, int min_size, const VertexSetVisitor& visit)
        : g_(g), min_size_(min_size), visit_(visit) {}

    void expand(VertexSet& r, std::vector<VertexId>& p, std::vector<VertexId>& x) {
        if (p.empty() && x.empty()) {
            if (static_cast<int>(r.size()) >= min_size_) {
                VertexSet clique(r);
                std::sort(clique.begin(), clique.end());
                visit_(clique);
            }
            return;
        }
        if (static_cast<int>(r.size() + p.size()) < min_size_) return;

        const VertexId pivot = choose_pivot(p, x);
        // Candidates: P \ N(pivot), ascending.
        std::vector<VertexId> candidates;
        {
            const auto nb = g_.neighbors(pivot);
            std::set_difference(p.begin(), p.end(), nb.begin(), nb.end(),
                                std::back_inserter(candidates));
        }
        for (VertexId v : candidates) {
            const auto nb = g_.neighbors(v);
            std::vector<VertexId> p_next, x_next;
            std::set_intersection(p.begin(), p.end(), nb.begin(), nb.end(),
                                  std::back_inserter(p_next));
            std::set_intersection(x.begin(), x.end(), nb.begin(), nb.end(),
                                  std::back_inserter(x_next));
            r.push_back(v);
            expand(r, p_next, x_next);
            r.pop_back();
            p.erase(std::lower_bound(p.begin(), p.end(), v));
            x.insert(std::lower_bound(x.begin(), x.end(), v), v);
        }
    }

private:
    VertexId choose_pivot(const std::vector<VertexId>& p,
                          const std::vector<VertexId>& x) const {
        VertexId best = p.empty() ? x.front() : p.front();
        size_t best_count = 0;
        bool first = true;
        for (const auto* side : {&p, &x}) {
            for (VertexId u : *side) {
                const auto nb = g_.neighbors(u);
                size_t count = 0;
                size_t i = 0, j = 0;
                while (i < p.size() && j < nb.size()) {
                    if (p[i] < nb[j])
                        ++i;
                    else if (p[i] > nb[j])
                        ++j;
                    else
                        ++count, ++i, ++j;
                }
                if (first || count > best_count ||
                    (count == best_count && u < best)) {
                    best = u;
                    best_count = count;
                    first = false;
                }
            }
        }
        return best;
    }

    const Graph& g_;
    int min_size_;
    const VertexSetVisitor& visit_;
};

} // namespace

void maximal_cliques(const Graph& g, const CliqueOptions& options,
                     const VertexSetVisitor& visit) {
    if (options.min_size < 1) throw Error("clique: min_size must be >= 1");
    const uint32_t n = g.vertex_count();
    if (n == 0) return;

    const auto order = degeneracy_order(g);
    std::vector<uint32_t> rank(n);
    for (uint32_t i = 0; i < n; ++i) rank[order[i]] = i;

    const int threads = std::max(1, options.threads);
    run_workers(threads, [&](int t) {
        BronKerbosch bk(g, options.min_size, visit);
        for (uint32_t i = t; i < n; i += static_cast<uint32_t>(threads)) {
            const VertexId v = order[i];
            std::vector<VertexId> p, x;
            for (VertexId w : g.neighbors(v)) {
                if (rank[w] > i)
                    p.push_back(w);
                else
                    x.push_back(w);
            }
            std::sort(p.begin(), p.end());
            std::sort(x.begin(), x.end());
            VertexSet r{v};
            bk.expand(r, p, x);
        }
    });
}

std::map<int, uint64_t> clique_size_histogram(const Graph& g,
                                              const CliqueOptions& options) {
    std::map<int, uint64_t> histogram;
    std::mutex mutex;
    maximal_cliques(g, options, [&](const VertexSet& clique) {
        std::lock_guard<std::mutex> lock(mutex);
        ++histogram[static_cast<int>(clique.size())];
    });
    return histogram;
}

} // namespace coclique
