#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "coclique/graph.hpp"
#include "coclique/review_store.hpp"

namespace coclique {

// k: minimum number of commonly reviewed venues.
// d: maximum gap in days between two users' reviews of the same venue
//    (inclusive: a gap of exactly d qualifies).
struct KDParams {
    int k = 1;
    int d = 0;
};

enum class WeightMode {
    kUnweighted,         // every edge weight 1
    kCoReviewCount,      // weight = number of qualifying venues (>= k)
    kFriendIntersection, // weight = |friends(u) ∩ friends(v)|
};

// Reviewer-similarity graph for one (k,d). Vertices are the users that
// appear in at least one qualifying edge, numbered in increasing UserId;
// isolated users are omitted. vertex_user maps back to store ids.
struct KDGraph {
    KDParams params;
    WeightMode mode = WeightMode::kUnweighted;
    Graph graph;
    std::vector<UserId> vertex_user; // ascending

    std::optional<VertexId> vertex_of(UserId user) const;
};

struct BuildOptions {
    WeightMode mode = WeightMode::kUnweighted;
    int threads = 0; // 0 = all cores
    // A single venue whose d-window pairing exceeds this many review pairs
    // aborts the build, naming the venue.
    uint64_t pair_budget = 100000000;
};

// Number of venues V such that u and v both reviewed V with some pair of
// review dates at most d days apart. Each venue counts once. Unknown users
// yield 0.
uint32_t qualifying_venues(const ReviewStore& store, UserId u, UserId v, int d);

// The qualifying venues themselves, with the witness date pair per venue
// (minimum gap, earliest dates on ties). Sorted by venue id.
struct VenueWitness {
    VenueId venue;
    DayNumber date_u;
    DayNumber date_v;
};
std::vector<VenueWitness> qualifying_venue_evidence(const ReviewStore& store, UserId u,
                                                    UserId v, int d);

// Per-venue sliding-window join: edge (u,v) iff qualifying_venues >= k.
KDGraph build_kd_graph(const ReviewStore& store, KDParams params,
                       const BuildOptions& options = {});

// One graph per (k,d) pair. Shares a single join pass at max(d) across the
// grid; results equal independent build_kd_graph calls.
std::map<std::pair<int, int>, KDGraph> kd_parameter_sweep(
    const ReviewStore& store, const std::vector<int>& k_list,
    const std::vector<int>& d_list, const BuildOptions& options = {});

// Edge list `ext_id <TAB> ext_id <TAB> weight`, lines sorted
// lexicographically; endpoint ids ordered within each line.
void write_edge_tsv(const KDGraph& kd, const ReviewStore& store, std::ostream& out);

// DOT with the weight as edge label.
void write_dot(const KDGraph& kd, const ReviewStore& store, std::ostream& out);

} // namespace coclique
