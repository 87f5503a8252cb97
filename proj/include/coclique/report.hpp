#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coclique/kdgraph.hpp"
#include "coclique/quasiclique.hpp"
#include "coclique/review_store.hpp"

namespace coclique {

enum class GroupKind { kClique, kQuasiClique };

// (k,d) x group-size grid of counts. `exact` counts maximal groups of
// exactly that size; `cumulative` counts maximal groups of size >= s.
// Every requested cell is present, zeros included.
struct CountTable {
    GroupKind kind = GroupKind::kClique;
    std::optional<Rational> theta; // set for quasi-cliques
    std::vector<int> k_list;
    std::vector<int> d_list;
    std::vector<int> sizes;
    std::map<std::pair<int, int>, std::map<int, uint64_t>> exact;
    std::map<std::pair<int, int>, std::map<int, uint64_t>> cumulative;

    bool operator==(const CountTable&) const = default;
};

CountTable build_count_table(const ReviewStore& store, const std::vector<int>& k_list,
                             const std::vector<int>& d_list,
                             const std::vector<int>& sizes, GroupKind kind,
                             std::optional<Rational> theta = std::nullopt,
                             const BuildOptions& build = {});

// CSV with header `k,d,size,count` (exact cells) and the cumulative
// variant `k,d,min_size,count`; rows sorted by (k,d,size).
void write_count_csv(const CountTable& table, std::ostream& out);
void write_cumulative_csv(const CountTable& table, std::ostream& out);

// Rebuilds a table from the two CSV files; parse(write(t)) == t.
CountTable parse_count_csv(std::istream& exact_csv, std::istream& cumulative_csv,
                           GroupKind kind, std::optional<Rational> theta);

// Aligned human-readable rendering of the exact grid.
void write_pretty_table(const CountTable& table, std::ostream& out);

// ---------------------------------------------------------------------------
// Flagged-group listings

struct PairEvidence {
    std::string u, v;          // external ids, u < v
    uint32_t venue_count = 0;  // full qualifying-venue count
    struct Venue {
        std::string venue;
        std::string date_u;
        std::string date_v;

        bool operator==(const Venue&) const = default;
    };
    std::vector<Venue> venues; // may be capped; sorted by venue id

    bool operator==(const PairEvidence&) const = default;
};

struct FlaggedGroup {
    std::vector<std::string> members; // sorted external ids
    int k = 0;
    int d = 0;
    GroupKind kind = GroupKind::kClique;
    std::optional<Rational> theta;
    std::vector<PairEvidence> pairs; // all member pairs, sorted by (u,v)

    bool operator==(const FlaggedGroup&) const = default;
};

struct FlagOptions {
    // Per-pair venue evidence is capped unless full_evidence is set.
    int venue_cap = 50;
    bool full_evidence = false;
    std::optional<int> max_size; // quasi-clique size cap, forwarded
    BuildOptions build;
};

// Enumerates maximal groups of min_size or larger at (k,d) and attaches
// the evidence needed to inspect them: member external ids, per-pair
// qualifying-venue counts, and witness review dates. Groups are sorted by
// descending size, then members.
std::vector<FlaggedGroup> flag_groups(const ReviewStore& store, KDParams params,
                                      GroupKind kind, int min_size,
                                      std::optional<Rational> theta = std::nullopt,
                                      const FlagOptions& options = {});

// JSON lines: {"members":[...],"k":…,"d":…,"kind":…,"pairs":[{"u":…,"v":…,
// "count":…,"venues":[{"venue":…,"date_u":…,"date_v":…}]}]}.
void write_groups_jsonl(const std::vector<FlaggedGroup>& groups, std::ostream& out);
std::vector<FlaggedGroup> parse_groups_jsonl(std::istream& in);

// Re-checks listed evidence against the store: witness dates must exist,
// respect the d window, and pair counts must match a recomputation.
struct ValidationReport {
    uint64_t groups = 0;
    uint64_t pairs = 0;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};
ValidationReport validate_groups(const ReviewStore& store,
                                 const std::vector<FlaggedGroup>& groups);

// ---------------------------------------------------------------------------
// Label annotation

// TSV `external_user_id <TAB> label`, one label per user (last line wins).
struct LabelFile {
    std::map<std::string, std::string> labels;
};
LabelFile load_labels(std::istream& in);

struct AnnotateStats {
    uint64_t flagged_users = 0; // distinct users across all groups
    std::map<std::string, uint64_t> flagged_label_counts;
    std::optional<uint64_t> graph_users; // set when a graph universe was given
    std::map<std::string, uint64_t> graph_label_counts;
    uint64_t unknown_label_users = 0; // labeled ids outside the universe
    struct GroupComposition {
        std::map<std::string, uint64_t> label_counts;
        uint64_t unlabeled = 0;
    };
    std::vector<GroupComposition> groups;
};

// Label statistics over the flagged population and, when `graph_users`
// (all vertex external ids of the source graph) is supplied, over the
// whole graph population as well. `universe` decides which labeled ids
// count as unknown; pass the store's user table when available.
AnnotateStats annotate(const std::vector<FlaggedGroup>& groups, const LabelFile& labels,
                       const std::optional<std::vector<std::string>>& graph_users =
                           std::nullopt,
                       const std::optional<std::vector<std::string>>& universe =
                           std::nullopt);

void write_annotate_json(const AnnotateStats& stats, std::ostream& out);

// ---------------------------------------------------------------------------
// Group graph export

enum class ExportFormat { kDot, kTsv };

// Union of the group-induced subgraphs, edges per the groups' (k,d) rule.
// DOT nodes carry the user's total review count and any label; edges carry
// the weight for `mode`.
void export_group_graph(const ReviewStore& store,
                        const std::vector<FlaggedGroup>& groups, WeightMode mode,
                        ExportFormat format, const LabelFile* labels,
                        std::ostream& out);

} // namespace coclique
