#include "coclique/quasiclique.hpp"

#include <algorithm>
#include <mutex>

#include "coclique/error.hpp"
#include "coclique/parallel.hpp"

namespace coclique {

namespace {

void validate(const QuasiParams& p) {
    if (p.theta.num <= 0 || compare(p.theta, Rational{1, 1}) > 0)
        throw Error("quasiclique: theta must be in (0,1]");
    if (p.min_size < 2) throw Error("quasiclique: min_size must be >= 2");
    if (p.max_size && *p.max_size < p.min_size)
        throw Error("quasiclique: max_size must be >= min_size");
}

uint64_t pairs_of(uint64_t s) { return s * (s - 1) / 2; }

// density >= theta  <=>  q * edges >= p * C(size, 2), in 128 bits.
bool dense_enough(uint64_t edges, uint64_t size, const Rational& theta) {
    return static_cast<unsigned __int128>(theta.den) * edges >=
           static_cast<unsigned __int128>(theta.num) * pairs_of(size);
}

// Depth-first reverse search from one singleton root. One instance per
// worker thread; all mutable state lives here.
class ReverseSearch {
public:
    ReverseSearch(const Graph& g, const QuasiParams& params, bool maximal_only,
                  const VertexSetVisitor& visit)
        : g_(g),
          params_(params),
          maximal_only_(maximal_only),
          visit_(visit),
          in_set_(g.vertex_count(), 0),
          deg_in_set_(g.vertex_count(), 0),
          adjacent_mark_(g.vertex_count(), 0) {}

    void run_root(VertexId root) {
        add(root);
        descend();
        remove(root);
    }

private:
    void add(VertexId v) {
        edges_ += deg_in_set_[v];
        in_set_[v] = 1;
        members_.push_back(v);
        for (VertexId w : g_.neighbors(v)) ++deg_in_set_[w];
    }

    void remove(VertexId v) {
        for (VertexId w : g_.neighbors(v)) --deg_in_set_[w];
        members_.pop_back();
        in_set_[v] = 0;
        edges_ -= deg_in_set_[v];
    }

    void emit() {
        VertexSet sorted(members_.begin(), members_.end());
        std::sort(sorted.begin(), sorted.end());
        visit_(sorted);
    }

    // No vertex outside S extends it to a qualifying set.
    bool is_maximal() const {
        const uint64_t size = members_.size();
        bool any_outside = false;
        uint32_t best_degree = 0;
        for (VertexId u = 0; u < g_.vertex_count(); ++u) {
            if (in_set_[u]) continue;
            any_outside = true;
            best_degree = std::max(best_degree, deg_in_set_[u]);
        }
        if (!any_outside) return true;
        return !dense_enough(edges_ + best_degree, size + 1, params_.theta);
    }

    // u joins S as the new minimum-degree vertex (largest id on ties),
    // i.e. parent(S ∪ {u}) == S.
    bool is_child_vertex(VertexId u) {
        ++mark_epoch_;
        for (VertexId w : g_.neighbors(u))
            if (in_set_[w]) adjacent_mark_[w] = mark_epoch_;
        const uint32_t u_degree = deg_in_set_[u];
        for (VertexId w : members_) {
            const uint32_t w_degree =
                deg_in_set_[w] + (adjacent_mark_[w] == mark_epoch_ ? 1 : 0);
            if (w_degree < u_degree) return false;
            if (w_degree == u_degree && w > u) return false;
        }
        return true;
    }

    void descend() {
        const uint64_t size = members_.size();
        if (static_cast<int>(size) >= params_.min_size) {
            if (!maximal_only_ || is_maximal()) emit();
        }
        if (params_.max_size && static_cast<int>(size) >= *params_.max_size) return;

        for (VertexId u = 0; u < g_.vertex_count(); ++u) {
            if (in_set_[u]) continue;
            if (!dense_enough(edges_ + deg_in_set_[u], size + 1, params_.theta))
                continue;
            if (!is_child_vertex(u)) continue;
            add(u);
            descend();
            remove(u);
        }
    }

    const Graph& g_;
    const QuasiParams& params_;
    const bool maximal_only_;
    const VertexSetVisitor& visit_;

    std::vector<VertexId> members_; // DFS path order, not sorted
    std::vector<char> in_set_;
    std::vector<uint32_t> deg_in_set_; // neighbors inside S, for every vertex
    uint64_t edges_ = 0;

    std::vector<uint64_t> adjacent_mark_;
    uint64_t mark_epoch_ = 0;
};

void enumerate(const Graph& g, const QuasiParams& params, bool maximal_only,
               const VertexSetVisitor& visit, int threads) {
    validate(params);
    const uint32_t n = g.vertex_count();
    if (n == 0) return;
    threads = std::max(1, threads);
    run_workers(threads, [&](int t) {
        ReverseSearch search(g, params, maximal_only, visit);
        for (VertexId root = t; root < n; root += static_cast<VertexId>(threads))
            search.run_root(root);
    });
}

} // namespace

Rational density(const Graph& g, const VertexSet& s) {
    if (s.size() <= 1) return Rational{1, 1};
    return Rational::of(static_cast<int64_t>(induced_edge_count(g, s)),
                        static_cast<int64_t>(pairs_of(s.size())));
}

void pseudo_cliques(const Graph& g, const QuasiParams& params,
                    const VertexSetVisitor& visit, int threads) {
    enumerate(g, params, /*maximal_only=*/false, visit, threads);
}

void maximal_pseudo_cliques(const Graph& g, const QuasiParams& params,
                            const VertexSetVisitor& visit, int threads) {
    enumerate(g, params, /*maximal_only=*/true, visit, threads);
}

std::map<int, uint64_t> quasiclique_size_histogram(const Graph& g,
                                                   const QuasiParams& params,
                                                   int threads) {
    std::map<int, uint64_t> histogram;
    std::mutex mutex;
    maximal_pseudo_cliques(
        g, params,
        [&](const VertexSet& s) {
            std::lock_guard<std::mutex> lock(mutex);
            ++histogram[static_cast<int>(s.size())];
        },
        threads);
    return histogram;
}

} // namespace coclique
