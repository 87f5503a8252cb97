#include "coclique/synth.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "coclique/date.hpp"
#include "coclique/error.hpp"

namespace coclique {

namespace {

std::string user_ext(uint32_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "u%06u", i);
    return buf;
}

std::string venue_ext(uint32_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "v%06u", i);
    return buf;
}

void validate(const SynthConfig& config) {
    if (config.n_users == 0 || config.n_venues == 0)
        throw Error("synth: need at least one user and one venue");
    if (config.span_days < 1) throw Error("synth: span must be >= 1 day");
    if (!parse_day(config.start_date)) throw Error("synth: bad start date");
    for (const auto& g : config.groups) {
        if (g.members < 1 || g.members > config.n_users)
            throw Error("synth: planted group size out of range");
        if (g.venues < 1 || g.venues > config.n_venues)
            throw Error("synth: planted venue count out of range");
        if (g.spread < 0 || g.spread >= config.span_days)
            throw Error("synth: planted spread does not fit the date span");
    }
}

std::vector<uint32_t> sample_distinct(std::mt19937_64& rng, uint32_t population,
                                      uint32_t count) {
    std::unordered_set<uint32_t> seen;
    std::vector<uint32_t> out;
    out.reserve(count);
    std::uniform_int_distribution<uint32_t> dist(0, population - 1);
    while (out.size() < count) {
        const uint32_t x = dist(rng);
        if (seen.insert(x).second) out.push_back(x);
    }
    return out;
}

void emit_review(std::ostream& out, uint32_t user, uint32_t venue, DayNumber day,
                 int stars) {
    out << "{\"user_id\":\"" << user_ext(user) << "\",\"business_id\":\""
        << venue_ext(venue) << "\",\"date\":\"" << format_day(day)
        << "\",\"stars\":" << stars << "}\n";
}

} // namespace

void write_synth_ndjson(const SynthConfig& config, std::ostream& reviews,
                        std::ostream* users, GroundTruth* truth) {
    validate(config);
    std::mt19937_64 rng(config.seed);
    const DayNumber start = *parse_day(config.start_date);
    std::uniform_int_distribution<int> stars_dist(1, 5);

    GroundTruth out_truth;
    for (const auto& spec : config.groups) {
        const auto members = sample_distinct(rng, config.n_users, spec.members);
        const auto venues = sample_distinct(rng, config.n_venues, spec.venues);
        std::uniform_int_distribution<int> anchor_dist(
            0, config.span_days - 1 - spec.spread);
        std::uniform_int_distribution<int> offset_dist(0, spec.spread);
        for (uint32_t venue : venues) {
            const int anchor = anchor_dist(rng);
            for (uint32_t user : members)
                emit_review(reviews, user, venue, start + anchor + offset_dist(rng),
                            stars_dist(rng));
        }
        PlantedGroup group;
        for (uint32_t user : members) group.users.push_back(user_ext(user));
        for (uint32_t venue : venues) group.venues.push_back(venue_ext(venue));
        std::sort(group.users.begin(), group.users.end());
        std::sort(group.venues.begin(), group.venues.end());
        group.spread = spec.spread;
        out_truth.groups.push_back(std::move(group));
    }

    std::uniform_int_distribution<uint32_t> user_dist(0, config.n_users - 1);
    std::uniform_int_distribution<uint32_t> venue_dist(0, config.n_venues - 1);
    std::uniform_int_distribution<int> day_dist(0, config.span_days - 1);
    for (uint64_t i = 0; i < config.background_reviews; ++i)
        emit_review(reviews, user_dist(rng), venue_dist(rng), start + day_dist(rng),
                    stars_dist(rng));

    if (users && config.friends_per_user > 0) {
        std::poisson_distribution<int> count_dist(config.friends_per_user);
        for (uint32_t u = 0; u < config.n_users; ++u) {
            const int count = count_dist(rng);
            *users << "{\"user_id\":\"" << user_ext(u) << "\",\"friends\":[";
            bool first = true;
            for (int i = 0; i < count; ++i) {
                const uint32_t f = user_dist(rng);
                if (f == u) continue;
                if (!first) *users << ",";
                *users << "\"" << user_ext(f) << "\"";
                first = false;
            }
            *users << "]}\n";
        }
    }

    if (truth) *truth = std::move(out_truth);
}

std::pair<ReviewStore, GroundTruth> generate(const SynthConfig& config) {
    std::stringstream reviews, users;
    GroundTruth truth;
    const bool with_users = config.friends_per_user > 0;
    write_synth_ndjson(config, reviews, with_users ? &users : nullptr, &truth);
    ReviewStore store = ingest_reviews(reviews);
    if (with_users) ingest_users(store, users);
    return {std::move(store), std::move(truth)};
}

std::string ground_truth_to_json(const GroundTruth& truth) {
    nlohmann::ordered_json doc;
    doc["groups"] = nlohmann::ordered_json::array();
    for (const auto& g : truth.groups) {
        nlohmann::ordered_json item;
        item["users"] = g.users;
        item["venues"] = g.venues;
        item["spread"] = g.spread;
        doc["groups"].push_back(std::move(item));
    }
    return doc.dump();
}

GroundTruth ground_truth_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (!doc.is_object() || !doc.contains("groups") || !doc["groups"].is_array())
        throw Error("synth: malformed ground truth JSON");
    GroundTruth truth;
    for (const auto& item : doc["groups"]) {
        PlantedGroup g;
        g.users = item.at("users").get<std::vector<std::string>>();
        g.venues = item.at("venues").get<std::vector<std::string>>();
        g.spread = item.at("spread").get<int>();
        truth.groups.push_back(std::move(g));
    }
    return truth;
}

Graph random_graph(uint32_t n, double p, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution edge(p);
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j)
            if (edge(rng)) edges.emplace_back(i, j);
    return Graph::from_edges(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Exhaustive oracles. Adjacency as per-vertex bitmasks; subsets as bits.

namespace {

std::vector<uint32_t> adjacency_masks(const Graph& g) {
    if (g.vertex_count() > 16) throw Error("oracle: refusing graphs with n > 16");
    std::vector<uint32_t> mask(g.vertex_count(), 0);
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        for (VertexId w : g.neighbors(v)) mask[v] |= 1u << w;
    return mask;
}

VertexSet bits_to_set(uint32_t bits) {
    VertexSet s;
    for (uint32_t v = 0; bits != 0; ++v, bits >>= 1)
        if (bits & 1) s.push_back(v);
    return s;
}

uint64_t subset_edges(const std::vector<uint32_t>& mask, uint32_t bits) {
    uint64_t twice = 0;
    for (uint32_t v = 0; v < mask.size(); ++v)
        if (bits & (1u << v)) twice += std::popcount(mask[v] & bits);
    return twice / 2;
}

bool subset_dense(const std::vector<uint32_t>& mask, uint32_t bits,
                  const Rational& theta) {
    const uint64_t size = std::popcount(bits);
    if (size <= 1) return true;
    const uint64_t pairs = size * (size - 1) / 2;
    return static_cast<unsigned __int128>(theta.den) * subset_edges(mask, bits) >=
           static_cast<unsigned __int128>(theta.num) * pairs;
}

} // namespace

std::set<VertexSet> oracle_maximal_cliques(const Graph& g, int min_size) {
    const auto mask = adjacency_masks(g);
    const uint32_t n = g.vertex_count();
    std::set<VertexSet> out;
    for (uint32_t bits = 1; bits < (1u << n); ++bits) {
        if (std::popcount(bits) < min_size) continue;
        bool clique = true;
        for (uint32_t v = 0; v < n && clique; ++v)
            if (bits & (1u << v))
                if ((bits & ~(1u << v)) & ~mask[v]) clique = false;
        if (!clique) continue;
        bool maximal = true;
        for (uint32_t u = 0; u < n && maximal; ++u)
            if (!(bits & (1u << u)) && (bits & mask[u]) == bits) maximal = false;
        if (maximal) out.insert(bits_to_set(bits));
    }
    return out;
}

std::set<VertexSet> oracle_pseudo_cliques(const Graph& g, const QuasiParams& params) {
    const auto mask = adjacency_masks(g);
    const uint32_t n = g.vertex_count();
    std::set<VertexSet> out;
    for (uint32_t bits = 1; bits < (1u << n); ++bits) {
        const int size = std::popcount(bits);
        if (size < params.min_size) continue;
        if (params.max_size && size > *params.max_size) continue;
        if (subset_dense(mask, bits, params.theta)) out.insert(bits_to_set(bits));
    }
    return out;
}

std::set<VertexSet> oracle_maximal_pseudo_cliques(const Graph& g,
                                                  const QuasiParams& params) {
    const auto mask = adjacency_masks(g);
    const uint32_t n = g.vertex_count();
    std::set<VertexSet> out;
    for (uint32_t bits = 1; bits < (1u << n); ++bits) {
        const int size = std::popcount(bits);
        if (size < params.min_size) continue;
        if (params.max_size && size > *params.max_size) continue;
        if (!subset_dense(mask, bits, params.theta)) continue;
        bool maximal = true;
        for (uint32_t u = 0; u < n && maximal; ++u)
            if (!(bits & (1u << u)))
                if (subset_dense(mask, bits | (1u << u), params.theta)) maximal = false;
        if (maximal) out.insert(bits_to_set(bits));
    }
    return out;
}

} // namespace coclique
