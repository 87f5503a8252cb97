#pragma once

#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "coclique/graph.hpp"
#include "coclique/quasiclique.hpp"
#include "coclique/review_store.hpp"

namespace coclique {

// A coordinated group to inject: `members` users each review the same
// `venues` venues, with per-venue review dates spanning at most `spread`
// days.
struct PlantedGroupSpec {
    uint32_t members = 0;
    uint32_t venues = 0;
    int spread = 0;
};

struct SynthConfig {
    uint64_t seed = 1;
    uint32_t n_users = 0;
    uint32_t n_venues = 0;
    uint64_t background_reviews = 0; // uniform draws over users x venues x days
    int span_days = 365;             // dates fall in [start, start + span)
    std::string start_date = "2010-01-01";
    std::vector<PlantedGroupSpec> groups;
    double friends_per_user = 0; // > 0 adds a user table with random friend lists
};

struct PlantedGroup {
    std::vector<std::string> users;  // external ids
    std::vector<std::string> venues; // external ids
    int spread = 0;

    bool operator==(const PlantedGroup&) const = default;
};

struct GroundTruth {
    std::vector<PlantedGroup> groups;

    bool operator==(const GroundTruth&) const = default;
};

// Writes the review stream (and, when configured, the user table) as the
// same newline-delimited JSON the ingest module reads. Deterministic for a
// fixed config: identical bytes on every run.
void write_synth_ndjson(const SynthConfig& config, std::ostream& reviews,
                        std::ostream* users, GroundTruth* truth);

// Convenience: generates in memory and runs it through the real ingest
// pipeline.
std::pair<ReviewStore, GroundTruth> generate(const SynthConfig& config);

std::string ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const std::string& text);

// Seeded G(n, p); every unordered pair becomes an edge with probability p.
Graph random_graph(uint32_t n, double p, uint64_t seed);

// Exhaustive 2^n subset scans for desk-scale differential testing. They
// share nothing with the enumeration code they check. Refuse n > 16.
std::set<VertexSet> oracle_maximal_cliques(const Graph& g, int min_size);
std::set<VertexSet> oracle_pseudo_cliques(const Graph& g, const QuasiParams& params);
std::set<VertexSet> oracle_maximal_pseudo_cliques(const Graph& g,
                                                  const QuasiParams& params);

} // namespace coclique
