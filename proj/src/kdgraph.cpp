#include "coclique/kdgraph.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <unordered_map>

#include "coclique/error.hpp"
#include "coclique/parallel.hpp"

namespace coclique {

namespace {

uint64_t pair_key(UserId u, UserId v) {
    if (u > v) std::swap(u, v);
    return (static_cast<uint64_t>(u) << 32) | v;
}

void validate(const KDParams& params) {
    if (params.k < 1) throw Error("kdgraph: k must be >= 1");
    if (params.d < 0) throw Error("kdgraph: d must be >= 0");
}

} // namespace

std::optional<VertexId> KDGraph::vertex_of(UserId user) const {
    auto it = std::lower_bound(vertex_user.begin(), vertex_user.end(), user);
    if (it == vertex_user.end() || *it != user) return std::nullopt;
    return static_cast<VertexId>(it - vertex_user.begin());
}

uint32_t qualifying_venues(const ReviewStore& store, UserId u, UserId v, int d) {
    return static_cast<uint32_t>(qualifying_venue_evidence(store, u, v, d).size());
}

std::vector<VenueWitness> qualifying_venue_evidence(const ReviewStore& store, UserId u,
                                                    UserId v, int d) {
    std::vector<VenueWitness> out;
    if (u == v || u >= store.user_count() || v >= store.user_count()) return out;
    const auto ru = store.user_reviews(u);
    const auto rv = store.user_reviews(v);
    size_t i = 0, j = 0;
    while (i < ru.venues.size() && j < rv.venues.size()) {
        if (ru.venues[i] < rv.venues[j]) {
            ++i;
        } else if (ru.venues[i] > rv.venues[j]) {
            ++j;
        } else {
            const VenueId venue = ru.venues[i];
            size_t iu = i, jv = j;
            while (iu < ru.venues.size() && ru.venues[iu] == venue) ++iu;
            while (jv < rv.venues.size() && rv.venues[jv] == venue) ++jv;
            // Witness: minimum |Δdate|, earliest (date_u, date_v) on ties.
            std::optional<VenueWitness> best;
            int best_gap = 0;
            for (size_t a = i; a < iu; ++a) {
                for (size_t b = j; b < jv; ++b) {
                    const int gap = std::abs(ru.days[a] - rv.days[b]);
                    if (gap > d) continue;
                    if (!best || gap < best_gap ||
                        (gap == best_gap &&
                         std::make_pair(ru.days[a], rv.days[b]) <
                             std::make_pair(best->date_u, best->date_v))) {
                        best = VenueWitness{venue, ru.days[a], rv.days[b]};
                        best_gap = gap;
                    }
                }
            }
            if (best) out.push_back(*best);
            i = iu;
            j = jv;
        }
    }
    return out;
}

namespace {

// Distinct qualifying user pairs of one venue group, each with the minimum
// gap seen in that venue. Throws when the window pairing exceeds budget.
void venue_window_pairs(const ReviewStore& store, VenueId venue, int d,
                        uint64_t pair_budget,
                        std::vector<std::pair<uint64_t, int>>& out) {
    const auto group = store.venue_reviews(venue);
    out.clear();
    uint64_t pairings = 0;
    const size_t n = group.users.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n && group.days[j] - group.days[i] <= d; ++j) {
            if (++pairings > pair_budget)
                throw Error("kdgraph: pair budget exceeded in venue " +
                            store.venue_ext_id(venue));
            if (group.users[i] == group.users[j]) continue;
            out.emplace_back(pair_key(group.users[i], group.users[j]),
                             group.days[j] - group.days[i]);
        }
    }
    std::sort(out.begin(), out.end());
    // Keep the smallest gap per pair (entries are sorted, so the first of
    // each run wins).
    out.erase(std::unique(out.begin(), out.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              out.end());
}

using PairCounts = std::unordered_map<uint64_t, uint32_t>;

// Runs the join at window d, counting distinct qualifying venues per pair.
PairCounts join_pair_counts(const ReviewStore& store, int d, int threads,
                            uint64_t pair_budget) {
    std::vector<PairCounts> partial(threads);
    run_workers(threads, [&](int t) {
        std::vector<std::pair<uint64_t, int>> scratch;
        for (VenueId venue = t; venue < store.venue_count();
             venue += static_cast<VenueId>(threads)) {
            venue_window_pairs(store, venue, d, pair_budget, scratch);
            for (const auto& entry : scratch) ++partial[t][entry.first];
        }
    });
    PairCounts merged = std::move(partial[0]);
    for (int t = 1; t < threads; ++t)
        for (const auto& [key, count] : partial[t]) merged[key] += count;
    return merged;
}

uint32_t friend_intersection(const ReviewStore& store, UserId u, UserId v) {
    const auto fu = store.friends(u);
    const auto fv = store.friends(v);
    size_t i = 0, j = 0;
    uint32_t count = 0;
    while (i < fu.size() && j < fv.size()) {
        if (fu[i] < fv[j])
            ++i;
        else if (fu[i] > fv[j])
            ++j;
        else
            ++count, ++i, ++j;
    }
    return count;
}

// Assembles a KDGraph from qualifying pairs (user-id space) and their
// co-review counts.
KDGraph assemble(const ReviewStore& store, KDParams params, WeightMode mode,
                 std::vector<std::pair<uint64_t, uint32_t>>&& pairs) {
    std::sort(pairs.begin(), pairs.end());

    std::vector<UserId> users;
    users.reserve(pairs.size() * 2);
    for (const auto& [key, count] : pairs) {
        users.push_back(static_cast<UserId>(key >> 32));
        users.push_back(static_cast<UserId>(key & 0xffffffffu));
    }
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());

    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<uint32_t> weights;
    edges.reserve(pairs.size());
    weights.reserve(pairs.size());
    const auto vertex = [&](UserId u) {
        return static_cast<VertexId>(
            std::lower_bound(users.begin(), users.end(), u) - users.begin());
    };
    for (const auto& [key, count] : pairs) {
        const UserId u = static_cast<UserId>(key >> 32);
        const UserId v = static_cast<UserId>(key & 0xffffffffu);
        edges.emplace_back(vertex(u), vertex(v));
        switch (mode) {
            case WeightMode::kUnweighted:
                weights.push_back(1);
                break;
            case WeightMode::kCoReviewCount:
                weights.push_back(count);
                break;
            case WeightMode::kFriendIntersection:
                weights.push_back(friend_intersection(store, u, v));
                break;
        }
    }

    KDGraph kd;
    kd.params = params;
    kd.mode = mode;
    kd.vertex_user = std::move(users);
    kd.graph = Graph::from_weighted_edges(static_cast<uint32_t>(kd.vertex_user.size()),
                                          std::move(edges), std::move(weights));
    return kd;
}

} // namespace

KDGraph build_kd_graph(const ReviewStore& store, KDParams params,
                       const BuildOptions& options) {
    validate(params);
    if (options.mode == WeightMode::kFriendIntersection && !store.friends_loaded())
        throw Error("kdgraph: friend-intersection weights need an ingested user table");

    const int threads = resolve_threads(options.threads);
    PairCounts counts = join_pair_counts(store, params.d, threads, options.pair_budget);

    std::vector<std::pair<uint64_t, uint32_t>> qualifying;
    for (const auto& [key, count] : counts)
        if (count >= static_cast<uint32_t>(params.k)) qualifying.emplace_back(key, count);
    return assemble(store, params, options.mode, std::move(qualifying));
}

std::map<std::pair<int, int>, KDGraph> kd_parameter_sweep(const ReviewStore& store,
                                                          const std::vector<int>& k_list,
                                                          const std::vector<int>& d_list,
                                                          const BuildOptions& options) {
    if (k_list.empty() || d_list.empty())
        throw Error("kdgraph: sweep needs non-empty k and d lists");
    for (int k : k_list) validate(KDParams{k, 0});
    for (int d : d_list) validate(KDParams{1, d});
    if (options.mode == WeightMode::kFriendIntersection && !store.friends_loaded())
        throw Error("kdgraph: friend-intersection weights need an ingested user table");

    const int threads = resolve_threads(options.threads);
    const int d_max = *std::max_element(d_list.begin(), d_list.end());

    // One join pass at d_max, recording per (pair, venue) the minimum gap;
    // every (k,d) then thresholds gap <= d and count >= k.
    using GapList = std::vector<std::pair<uint64_t, int>>; // (pair key, gap)
    std::vector<GapList> partial(threads);
    run_workers(threads, [&](int t) {
        std::vector<std::pair<uint64_t, int>> scratch;
        for (VenueId venue = t; venue < store.venue_count();
             venue += static_cast<VenueId>(threads)) {
            venue_window_pairs(store, venue, d_max, options.pair_budget, scratch);
            partial[t].insert(partial[t].end(), scratch.begin(), scratch.end());
        }
    });

    GapList all;
    size_t total = 0;
    for (const auto& p : partial) total += p.size();
    all.reserve(total);
    for (auto& p : partial) {
        all.insert(all.end(), p.begin(), p.end());
        GapList().swap(p);
    }
    std::sort(all.begin(), all.end()); // by pair key, then gap

    std::map<std::pair<int, int>, KDGraph> result;
    for (int k : k_list) {
        for (int d : d_list) {
            std::vector<std::pair<uint64_t, uint32_t>> qualifying;
            size_t i = 0;
            while (i < all.size()) {
                const uint64_t key = all[i].first;
                uint32_t venues_within_d = 0;
                while (i < all.size() && all[i].first == key) {
                    if (all[i].second <= d) ++venues_within_d;
                    ++i;
                }
                if (venues_within_d >= static_cast<uint32_t>(k))
                    qualifying.emplace_back(key, venues_within_d);
            }
            result.emplace(std::make_pair(k, d),
                           assemble(store, KDParams{k, d}, options.mode,
                                    std::move(qualifying)));
        }
    }
    return result;
}

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

void write_edge_tsv(const KDGraph& kd, const ReviewStore& store, std::ostream& out) {
    std::vector<std::string> lines;
    lines.reserve(kd.graph.edge_count());
    for (VertexId v = 0; v < kd.graph.vertex_count(); ++v) {
        const auto nb = kd.graph.neighbors(v);
        const auto wt = kd.graph.neighbor_weights(v);
        for (size_t i = 0; i < nb.size(); ++i) {
            if (nb[i] < v) continue; // emit each edge once
            std::string a = store.user_ext_id(kd.vertex_user[v]);
            std::string b = store.user_ext_id(kd.vertex_user[nb[i]]);
            if (b < a) std::swap(a, b);
            lines.push_back(a + "\t" + b + "\t" +
                            std::to_string(wt.empty() ? 1 : wt[i]));
        }
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& line : lines) out << line << "\n";
}

void write_dot(const KDGraph& kd, const ReviewStore& store, std::ostream& out) {
    out << "graph coclique {\n";
    std::vector<std::string> lines;
    lines.reserve(kd.graph.edge_count());
    for (VertexId v = 0; v < kd.graph.vertex_count(); ++v) {
        const auto nb = kd.graph.neighbors(v);
        const auto wt = kd.graph.neighbor_weights(v);
        for (size_t i = 0; i < nb.size(); ++i) {
            if (nb[i] < v) continue;
            std::string a = store.user_ext_id(kd.vertex_user[v]);
            std::string b = store.user_ext_id(kd.vertex_user[nb[i]]);
            if (b < a) std::swap(a, b);
            lines.push_back("  " + dot_quote(a) + " -- " + dot_quote(b) + " [label=" +
                            std::to_string(wt.empty() ? 1 : wt[i]) + "];");
        }
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& line : lines) out << line << "\n";
    out << "}\n";
}

} // namespace coclique
