#include "coclique/report.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coclique/clique.hpp"
#include "coclique/error.hpp"
#include "coclique/parallel.hpp"

namespace coclique {

namespace {

std::map<int, uint64_t> group_histogram(const KDGraph& kd, GroupKind kind,
                                        int min_size, std::optional<Rational> theta,
                                        int threads) {
    if (kind == GroupKind::kClique)
        return clique_size_histogram(kd.graph, CliqueOptions{min_size, threads});
    QuasiParams params;
    params.theta = theta.value_or(Rational{9, 10});
    params.min_size = min_size;
    return quasiclique_size_histogram(kd.graph, params, threads);
}

} // namespace

CountTable build_count_table(const ReviewStore& store, const std::vector<int>& k_list,
                             const std::vector<int>& d_list,
                             const std::vector<int>& sizes, GroupKind kind,
                             std::optional<Rational> theta, const BuildOptions& build) {
    if (sizes.empty()) throw Error("report: size list must not be empty");
    if (kind == GroupKind::kQuasiClique && !theta) theta = Rational{9, 10};

    CountTable table;
    table.kind = kind;
    table.theta = theta;
    table.k_list = k_list;
    table.d_list = d_list;
    table.sizes = sizes;
    std::sort(table.k_list.begin(), table.k_list.end());
    table.k_list.erase(std::unique(table.k_list.begin(), table.k_list.end()),
                       table.k_list.end());
    std::sort(table.d_list.begin(), table.d_list.end());
    table.d_list.erase(std::unique(table.d_list.begin(), table.d_list.end()),
                       table.d_list.end());
    std::sort(table.sizes.begin(), table.sizes.end());
    table.sizes.erase(std::unique(table.sizes.begin(), table.sizes.end()),
                      table.sizes.end());

    const int min_size = table.sizes.front();
    const int threads = resolve_threads(build.threads);
    const auto graphs = kd_parameter_sweep(store, table.k_list, table.d_list, build);
    for (const auto& [kd_key, kd] : graphs) {
        const auto histogram = group_histogram(kd, kind, min_size, theta, threads);
        auto& exact = table.exact[kd_key];
        auto& cumulative = table.cumulative[kd_key];
        for (int size : table.sizes) {
            const auto it = histogram.find(size);
            exact[size] = it == histogram.end() ? 0 : it->second;
            uint64_t at_least = 0;
            for (const auto& [s, count] : histogram)
                if (s >= size) at_least += count;
            cumulative[size] = at_least;
        }
    }
    return table;
}

void write_count_csv(const CountTable& table, std::ostream& out) {
    out << "k,d,size,count\n";
    for (const auto& [kd_key, cells] : table.exact)
        for (const auto& [size, count] : cells)
            out << kd_key.first << "," << kd_key.second << "," << size << "," << count
                << "\n";
}

void write_cumulative_csv(const CountTable& table, std::ostream& out) {
    out << "k,d,min_size,count\n";
    for (const auto& [kd_key, cells] : table.cumulative)
        for (const auto& [size, count] : cells)
            out << kd_key.first << "," << kd_key.second << "," << size << "," << count
                << "\n";
}

namespace {

std::map<std::pair<int, int>, std::map<int, uint64_t>> parse_grid_csv(
    std::istream& in, const std::string& expected_header) {
    std::string line;
    if (!std::getline(in, line) || line != expected_header)
        throw Error("report: bad CSV header, expected " + expected_header);
    std::map<std::pair<int, int>, std::map<int, uint64_t>> grid;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        long long values[4];
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(row, field, ',')) throw Error("report: short CSV row");
            try {
                values[i] = std::stoll(field);
            } catch (const std::exception&) {
                throw Error("report: non-numeric CSV field: " + field);
            }
        }
        grid[{static_cast<int>(values[0]), static_cast<int>(values[1])}]
            [static_cast<int>(values[2])] = static_cast<uint64_t>(values[3]);
    }
    return grid;
}

} // namespace

CountTable parse_count_csv(std::istream& exact_csv, std::istream& cumulative_csv,
                           GroupKind kind, std::optional<Rational> theta) {
    CountTable table;
    table.kind = kind;
    table.theta = theta;
    table.exact = parse_grid_csv(exact_csv, "k,d,size,count");
    table.cumulative = parse_grid_csv(cumulative_csv, "k,d,min_size,count");

    std::set<int> ks, ds, sizes;
    for (const auto& [kd_key, cells] : table.exact) {
        ks.insert(kd_key.first);
        ds.insert(kd_key.second);
        for (const auto& [size, count] : cells) sizes.insert(size);
    }
    table.k_list.assign(ks.begin(), ks.end());
    table.d_list.assign(ds.begin(), ds.end());
    table.sizes.assign(sizes.begin(), sizes.end());
    return table;
}

void write_pretty_table(const CountTable& table, std::ostream& out) {
    out << (table.kind == GroupKind::kClique ? "maximal cliques"
                                             : "maximal quasi-cliques");
    if (table.theta) out << " (theta = " << table.theta->str() << ")";
    out << ", exact sizes\n";
    out << std::setw(8) << "(k,d)";
    for (int size : table.sizes) out << std::setw(10) << size;
    out << "\n";
    for (const auto& [kd_key, cells] : table.exact) {
        std::ostringstream key;
        key << "(" << kd_key.first << "," << kd_key.second << ")";
        out << std::setw(8) << key.str();
        for (int size : table.sizes) out << std::setw(10) << cells.at(size);
        out << "\n";
    }
}

// ---------------------------------------------------------------------------

std::vector<FlaggedGroup> flag_groups(const ReviewStore& store, KDParams params,
                                      GroupKind kind, int min_size,
                                      std::optional<Rational> theta,
                                      const FlagOptions& options) {
    if (kind == GroupKind::kQuasiClique && !theta) theta = Rational{9, 10};
    const KDGraph kd = build_kd_graph(store, params, options.build);
    const int threads = resolve_threads(options.build.threads);

    std::vector<VertexSet> raw;
    std::mutex mutex;
    const auto collect = [&](const VertexSet& s) {
        std::lock_guard<std::mutex> lock(mutex);
        raw.push_back(s);
    };
    if (kind == GroupKind::kClique) {
        maximal_cliques(kd.graph, CliqueOptions{min_size, threads}, collect);
    } else {
        QuasiParams qp;
        qp.theta = *theta;
        qp.min_size = min_size;
        qp.max_size = options.max_size;
        maximal_pseudo_cliques(kd.graph, qp, collect, threads);
    }

    std::vector<FlaggedGroup> groups;
    groups.reserve(raw.size());
    for (const VertexSet& s : raw) {
        FlaggedGroup group;
        group.k = params.k;
        group.d = params.d;
        group.kind = kind;
        group.theta = theta;
        std::vector<UserId> users;
        users.reserve(s.size());
        for (VertexId v : s) users.push_back(kd.vertex_user[v]);
        for (UserId u : users) group.members.push_back(store.user_ext_id(u));
        std::sort(group.members.begin(), group.members.end());

        for (size_t i = 0; i < users.size(); ++i) {
            for (size_t j = i + 1; j < users.size(); ++j) {
                // Order the endpoints before computing evidence so date_u
                // stays attached to pair.u.
                UserId a = users[i], b = users[j];
                if (store.user_ext_id(b) < store.user_ext_id(a)) std::swap(a, b);
                const auto witnesses = qualifying_venue_evidence(store, a, b, params.d);
                PairEvidence pair;
                pair.u = store.user_ext_id(a);
                pair.v = store.user_ext_id(b);
                pair.venue_count = static_cast<uint32_t>(witnesses.size());
                const size_t cap = options.full_evidence
                                       ? witnesses.size()
                                       : std::min<size_t>(witnesses.size(),
                                                          options.venue_cap);
                for (size_t w = 0; w < cap; ++w)
                    pair.venues.push_back({store.venue_ext_id(witnesses[w].venue),
                                           format_day(witnesses[w].date_u),
                                           format_day(witnesses[w].date_v)});
                std::sort(pair.venues.begin(), pair.venues.end(),
                          [](const auto& a, const auto& b) { return a.venue < b.venue; });
                group.pairs.push_back(std::move(pair));
            }
        }
        std::sort(group.pairs.begin(), group.pairs.end(),
                  [](const PairEvidence& a, const PairEvidence& b) {
                      return std::tie(a.u, a.v) < std::tie(b.u, b.v);
                  });
        groups.push_back(std::move(group));
    }

    std::sort(groups.begin(), groups.end(), [](const FlaggedGroup& a, const FlaggedGroup& b) {
        if (a.members.size() != b.members.size())
            return a.members.size() > b.members.size();
        return a.members < b.members;
    });
    return groups;
}

namespace {

const char* kind_name(GroupKind kind) {
    return kind == GroupKind::kClique ? "clique" : "quasiclique";
}

GroupKind kind_from_name(const std::string& name) {
    if (name == "clique") return GroupKind::kClique;
    if (name == "quasiclique") return GroupKind::kQuasiClique;
    throw Error("report: unknown group kind: " + name);
}

} // namespace

void write_groups_jsonl(const std::vector<FlaggedGroup>& groups, std::ostream& out) {
    for (const auto& group : groups) {
        nlohmann::ordered_json doc;
        doc["members"] = group.members;
        doc["k"] = group.k;
        doc["d"] = group.d;
        doc["kind"] = kind_name(group.kind);
        if (group.theta) doc["theta"] = group.theta->str();
        auto& pairs = doc["pairs"] = nlohmann::ordered_json::array();
        for (const auto& pair : group.pairs) {
            nlohmann::ordered_json p;
            p["u"] = pair.u;
            p["v"] = pair.v;
            p["count"] = pair.venue_count;
            auto& venues = p["venues"] = nlohmann::ordered_json::array();
            for (const auto& venue : pair.venues) {
                nlohmann::ordered_json v;
                v["venue"] = venue.venue;
                v["date_u"] = venue.date_u;
                v["date_v"] = venue.date_v;
                venues.push_back(std::move(v));
            }
            pairs.push_back(std::move(p));
        }
        out << doc.dump() << "\n";
    }
}

std::vector<FlaggedGroup> parse_groups_jsonl(std::istream& in) {
    std::vector<FlaggedGroup> groups;
    std::string line;
    uint64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const auto doc = nlohmann::json::parse(line, nullptr, false);
        if (!doc.is_object())
            throw Error("report: bad group JSON at line " + std::to_string(line_number));
        FlaggedGroup group;
        group.members = doc.at("members").get<std::vector<std::string>>();
        group.k = doc.at("k").get<int>();
        group.d = doc.at("d").get<int>();
        group.kind = kind_from_name(doc.value("kind", "clique"));
        if (doc.contains("theta")) {
            const auto theta = Rational::parse(doc["theta"].get<std::string>());
            if (!theta) throw Error("report: bad theta in group JSON");
            group.theta = *theta;
        }
        for (const auto& p : doc.at("pairs")) {
            PairEvidence pair;
            pair.u = p.at("u").get<std::string>();
            pair.v = p.at("v").get<std::string>();
            pair.venue_count = p.at("count").get<uint32_t>();
            for (const auto& v : p.at("venues"))
                pair.venues.push_back({v.at("venue").get<std::string>(),
                                       v.at("date_u").get<std::string>(),
                                       v.at("date_v").get<std::string>()});
            group.pairs.push_back(std::move(pair));
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

ValidationReport validate_groups(const ReviewStore& store,
                                 const std::vector<FlaggedGroup>& groups) {
    ValidationReport report;
    const auto has_review = [&](const std::string& user_ext, const std::string& venue_ext,
                                const std::string& date) {
        const auto user = store.find_user(user_ext);
        const auto venue = store.find_venue(venue_ext);
        const auto day = parse_day(date);
        if (!user || !venue || !day) return false;
        const auto reviews = store.user_reviews(*user);
        for (size_t i = 0; i < reviews.venues.size(); ++i)
            if (reviews.venues[i] == *venue && reviews.days[i] == *day) return true;
        return false;
    };

    for (size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& group = groups[gi];
        ++report.groups;
        const auto where = [&](const std::string& detail) {
            return "group " + std::to_string(gi) + ": " + detail;
        };
        if (group.members.size() < 2) report.errors.push_back(where("fewer than 2 members"));

        uint64_t edge_pairs = 0;
        for (const auto& pair : group.pairs) {
            ++report.pairs;
            const auto u = store.find_user(pair.u);
            const auto v = store.find_user(pair.v);
            if (!u || !v) {
                report.errors.push_back(where("unknown member in pair " + pair.u + "," +
                                              pair.v));
                continue;
            }
            const uint32_t recomputed = qualifying_venues(store, *u, *v, group.d);
            if (recomputed != pair.venue_count)
                report.errors.push_back(where("pair " + pair.u + "," + pair.v +
                                              " count " + std::to_string(pair.venue_count) +
                                              " != recomputed " +
                                              std::to_string(recomputed)));
            if (pair.venue_count >= static_cast<uint32_t>(group.k)) ++edge_pairs;
            for (const auto& venue : pair.venues) {
                const auto du = parse_day(venue.date_u);
                const auto dv = parse_day(venue.date_v);
                if (!du || !dv || std::abs(*du - *dv) > group.d)
                    report.errors.push_back(where("witness dates outside d window for " +
                                                  venue.venue));
                if (!has_review(pair.u, venue.venue, venue.date_u) ||
                    !has_review(pair.v, venue.venue, venue.date_v))
                    report.errors.push_back(where("witness review missing in store for " +
                                                  venue.venue));
            }
        }

        const uint64_t all_pairs =
            group.members.size() * (group.members.size() - 1) / 2;
        if (group.pairs.size() != all_pairs)
            report.errors.push_back(where("expected " + std::to_string(all_pairs) +
                                          " pairs, listed " +
                                          std::to_string(group.pairs.size())));
        if (group.kind == GroupKind::kClique) {
            if (edge_pairs != all_pairs)
                report.errors.push_back(where("clique has non-qualifying pair"));
        } else if (group.theta) {
            // Quasi-clique: qualifying pairs must reach theta density.
            const Rational& theta = *group.theta;
            if (static_cast<unsigned __int128>(theta.den) * edge_pairs <
                static_cast<unsigned __int128>(theta.num) * all_pairs)
                report.errors.push_back(where("density below theta"));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

LabelFile load_labels(std::istream& in) {
    if (!in.good()) throw Error("labels: unreadable label file");
    LabelFile file;
    std::string line;
    uint64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw Error("labels: malformed line " + std::to_string(line_number) +
                        " (expected id<TAB>label)");
        file.labels[line.substr(0, tab)] = line.substr(tab + 1);
    }
    if (in.bad()) throw Error("labels: I/O failure");
    return file;
}

AnnotateStats annotate(const std::vector<FlaggedGroup>& groups, const LabelFile& labels,
                       const std::optional<std::vector<std::string>>& graph_users,
                       const std::optional<std::vector<std::string>>& universe) {
    AnnotateStats stats;

    std::set<std::string> flagged;
    for (const auto& group : groups)
        flagged.insert(group.members.begin(), group.members.end());
    stats.flagged_users = flagged.size();
    for (const auto& user : flagged) {
        const auto it = labels.labels.find(user);
        if (it != labels.labels.end()) ++stats.flagged_label_counts[it->second];
    }

    if (graph_users) {
        std::set<std::string> population(graph_users->begin(), graph_users->end());
        stats.graph_users = population.size();
        for (const auto& user : population) {
            const auto it = labels.labels.find(user);
            if (it != labels.labels.end()) ++stats.graph_label_counts[it->second];
        }
    }

    // Unknown labeled users, relative to the given universe (store user
    // table when available, else everything seen here).
    std::set<std::string> known;
    if (universe) {
        known.insert(universe->begin(), universe->end());
    } else {
        known = flagged;
        if (graph_users) known.insert(graph_users->begin(), graph_users->end());
    }
    for (const auto& [user, label] : labels.labels)
        if (!known.count(user)) ++stats.unknown_label_users;

    for (const auto& group : groups) {
        AnnotateStats::GroupComposition comp;
        for (const auto& member : group.members) {
            const auto it = labels.labels.find(member);
            if (it == labels.labels.end())
                ++comp.unlabeled;
            else
                ++comp.label_counts[it->second];
        }
        stats.groups.push_back(std::move(comp));
    }
    return stats;
}

void write_annotate_json(const AnnotateStats& stats, std::ostream& out) {
    nlohmann::ordered_json doc;
    const auto population = [](uint64_t total,
                               const std::map<std::string, uint64_t>& counts) {
        nlohmann::ordered_json block;
        block["users"] = total;
        auto& by_label = block["labels"] = nlohmann::ordered_json::object();
        for (const auto& [label, count] : counts) {
            nlohmann::ordered_json entry;
            entry["count"] = count;
            entry["fraction"] =
                total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
            by_label[label] = std::move(entry);
        }
        return block;
    };
    doc["flagged"] = population(stats.flagged_users, stats.flagged_label_counts);
    if (stats.graph_users)
        doc["graph"] = population(*stats.graph_users, stats.graph_label_counts);
    doc["warnings"] = {{"unknown_label_users", stats.unknown_label_users}};
    auto& groups = doc["groups"] = nlohmann::ordered_json::array();
    for (const auto& comp : stats.groups) {
        nlohmann::ordered_json g;
        g["size"] = comp.unlabeled +
                    std::accumulate(comp.label_counts.begin(), comp.label_counts.end(),
                                    uint64_t{0},
                                    [](uint64_t acc, const auto& kv) {
                                        return acc + kv.second;
                                    });
        auto& by_label = g["labels"] = nlohmann::ordered_json::object();
        for (const auto& [label, count] : comp.label_counts) by_label[label] = count;
        g["unlabeled"] = comp.unlabeled;
        groups.push_back(std::move(g));
    }
    out << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

void export_group_graph(const ReviewStore& store,
                        const std::vector<FlaggedGroup>& groups, WeightMode mode,
                        ExportFormat format, const LabelFile* labels,
                        std::ostream& out) {
    if (mode == WeightMode::kFriendIntersection && !store.friends_loaded())
        throw Error("report: friend-intersection weights need an ingested user table");

    // Union of member sets; edges re-derived from each group's (k,d) rule.
    std::set<std::string> member_exts;
    for (const auto& group : groups)
        member_exts.insert(group.members.begin(), group.members.end());

    std::map<std::pair<std::string, std::string>, uint32_t> edges;
    for (const auto& group : groups) {
        for (size_t i = 0; i < group.members.size(); ++i) {
            for (size_t j = i + 1; j < group.members.size(); ++j) {
                const auto u = store.find_user(group.members[i]);
                const auto v = store.find_user(group.members[j]);
                if (!u || !v)
                    throw Error("report: group member not in store: " +
                                (u ? group.members[j] : group.members[i]));
                const uint32_t venues = qualifying_venues(store, *u, *v, group.d);
                if (venues < static_cast<uint32_t>(group.k)) continue;
                uint32_t weight = 1;
                if (mode == WeightMode::kCoReviewCount) {
                    weight = venues;
                } else if (mode == WeightMode::kFriendIntersection) {
                    const auto fu = store.friends(*u);
                    const auto fv = store.friends(*v);
                    size_t a = 0, b = 0;
                    uint32_t common = 0;
                    while (a < fu.size() && b < fv.size()) {
                        if (fu[a] < fv[b])
                            ++a;
                        else if (fu[a] > fv[b])
                            ++b;
                        else
                            ++common, ++a, ++b;
                    }
                    weight = common;
                }
                auto key = std::minmax(group.members[i], group.members[j]);
                edges[{key.first, key.second}] = weight;
            }
        }
    }

    if (format == ExportFormat::kTsv) {
        for (const auto& [key, weight] : edges)
            out << key.first << "\t" << key.second << "\t" << weight << "\n";
        return;
    }

    const auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') q.push_back('\\');
            q.push_back(c);
        }
        q.push_back('"');
        return q;
    };
    out << "graph groups {\n";
    for (const auto& ext : member_exts) {
        const auto user = store.find_user(ext);
        const uint64_t reviews = user ? store.user_review_count(*user) : 0;
        out << "  " << quote(ext) << " [reviews=" << reviews;
        if (labels) {
            const auto it = labels->labels.find(ext);
            if (it != labels->labels.end()) out << ", label=" << quote(it->second);
        }
        out << "];\n";
    }
    for (const auto& [key, weight] : edges)
        out << "  " << quote(key.first) << " -- " << quote(key.second)
            << " [label=" << weight << "];\n";
    out << "}\n";
}

} // namespace coclique
