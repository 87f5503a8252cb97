#include "coclique/verify.hpp"

#include <mutex>
#include <set>
#include <sstream>

#include "coclique/clique.hpp"
#include "coclique/quasiclique.hpp"
#include "coclique/synth.hpp"

namespace coclique {

namespace {

std::set<VertexSet> collect_cliques(const Graph& g, int min_size, int threads) {
    std::set<VertexSet> out;
    std::mutex mutex;
    maximal_cliques(g, CliqueOptions{min_size, threads}, [&](const VertexSet& s) {
        std::lock_guard<std::mutex> lock(mutex);
        out.insert(s);
    });
    return out;
}

std::set<VertexSet> collect_pseudo(const Graph& g, const QuasiParams& p, bool maximal,
                                   int threads) {
    std::set<VertexSet> out;
    std::mutex mutex;
    const auto sink = [&](const VertexSet& s) {
        std::lock_guard<std::mutex> lock(mutex);
        out.insert(s);
    };
    if (maximal)
        maximal_pseudo_cliques(g, p, sink, threads);
    else
        pseudo_cliques(g, p, sink, threads);
    return out;
}

} // namespace

VerifyResult run_differential_suite(const VerifyOptions& options) {
    VerifyResult result;
    uint64_t seed = options.seed;

    const auto mismatch = [&](const std::string& what, uint32_t n, double p,
                              uint64_t graph_seed) {
        std::ostringstream msg;
        msg << what << " mismatch on G(n=" << n << ", p=" << p
            << ", seed=" << graph_seed << ")";
        result.failures.push_back(msg.str());
    };

    for (int i = 0; i < options.graphs; ++i) {
        for (double p : options.edge_probs) {
            // Cliques: sizes 4..clique_max_n cycle through the run.
            {
                const uint64_t graph_seed = seed++;
                const uint32_t n = 4 + static_cast<uint32_t>(
                                           graph_seed % (options.clique_max_n - 3));
                const Graph g = random_graph(n, p, graph_seed);
                if (collect_cliques(g, 1, options.threads) !=
                    oracle_maximal_cliques(g, 1))
                    mismatch("maximal_cliques", n, p, graph_seed);
                ++result.graphs_checked;
            }
            // Pseudo-cliques at every theta, plain and maximal.
            {
                const uint64_t graph_seed = seed++;
                const uint32_t n =
                    4 + static_cast<uint32_t>(graph_seed % (options.quasi_max_n - 3));
                const Graph g = random_graph(n, p, graph_seed);
                for (const Rational& theta : options.thetas) {
                    QuasiParams qp;
                    qp.theta = theta;
                    qp.min_size = 2;
                    if (collect_pseudo(g, qp, false, options.threads) !=
                        oracle_pseudo_cliques(g, qp))
                        mismatch("pseudo_cliques(theta=" + theta.str() + ")", n, p,
                                 graph_seed);
                    if (collect_pseudo(g, qp, true, options.threads) !=
                        oracle_maximal_pseudo_cliques(g, qp))
                        mismatch("maximal_pseudo_cliques(theta=" + theta.str() + ")", n,
                                 p, graph_seed);
                }
                ++result.graphs_checked;
            }
        }
    }
    return result;
}

} // namespace coclique
