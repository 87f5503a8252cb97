#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coclique/error.hpp"
#include "coclique/kdgraph.hpp"
#include "coclique/parallel.hpp"
#include "coclique/report.hpp"
#include "coclique/review_store.hpp"
#include "coclique/synth.hpp"
#include "coclique/verify.hpp"

namespace {

using namespace coclique;

// "-" selects stdout/stdin so subcommands compose in pipes.
class Output {
public:
    explicit Output(const std::string& path) : to_stdout_(path == "-") {
        if (!to_stdout_) {
            file_.open(path, std::ios::binary);
            if (!file_) throw Error("cannot open for writing: " + path);
        }
    }
    std::ostream& stream() { return to_stdout_ ? std::cout : file_; }
    void finish() {
        if (to_stdout_) {
            std::cout.flush();
            return;
        }
        file_.flush();
        if (!file_) throw Error("write failure");
    }

private:
    bool to_stdout_;
    std::ofstream file_;
};

class Input {
public:
    explicit Input(const std::string& path) : from_stdin_(path == "-") {
        if (!from_stdin_) {
            file_.open(path, std::ios::binary);
            if (!file_) throw Error("cannot open for reading: " + path);
        }
    }
    std::istream& stream() { return from_stdin_ ? std::cin : file_; }

private:
    bool from_stdin_;
    std::ifstream file_;
};

WeightMode parse_mode(const std::string& name) {
    if (name == "unweighted") return WeightMode::kUnweighted;
    if (name == "co-review" || name == "coreview") return WeightMode::kCoReviewCount;
    if (name == "friend-intersection" || name == "friends")
        return WeightMode::kFriendIntersection;
    throw Error("unknown weight mode: " + name);
}

GroupKind parse_kind(const std::string& name) {
    if (name == "clique") return GroupKind::kClique;
    if (name == "quasiclique" || name == "quasi") return GroupKind::kQuasiClique;
    throw Error("unknown kind: " + name);
}

Rational parse_theta(const std::string& text) {
    const auto theta = Rational::parse(text);
    if (!theta) throw Error("cannot parse theta: " + text);
    return *theta;
}

PlantedGroupSpec parse_plant(const std::string& text) {
    PlantedGroupSpec spec;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(text);
    if (!(in >> spec.members >> sep1 >> spec.venues >> sep2 >> spec.spread) ||
        sep1 != 'x' || sep2 != 'x' || !in.eof())
        throw Error("bad --plant spec (want MxVxS, e.g. 11x6x5): " + text);
    return spec;
}

// Shared flag for subcommands that consume a store.
struct StoreArgs {
    std::string store_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--store", store_path, "Review store file (CSCT)")->required();
    }
    ReviewStore load() const { return ReviewStore::load(store_path); }
};

int run(int argc, char** argv) {
    CLI::App app{"coclique: coordinated reviewer-group detection over co-review graphs"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file; command-line flags win");
    app.set_version_flag("--version", "coclique 0.1.0");

    // --- synth -------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic review stream");
    struct {
        uint64_t seed = 1;
        uint32_t users = 100;
        uint32_t venues = 50;
        int span = 365;
        std::string start_date = "2010-01-01";
        uint64_t background = 0;
        std::vector<std::string> plants;
        double friends_avg = 0;
        std::string reviews_out;
        std::string users_out;
        std::string truth_out;
    } synth_args;
    synth_cmd->add_option("--seed", synth_args.seed, "RNG seed");
    synth_cmd->add_option("--users", synth_args.users, "Number of users");
    synth_cmd->add_option("--venues", synth_args.venues, "Number of venues");
    synth_cmd->add_option("--span", synth_args.span, "Date span in days");
    synth_cmd->add_option("--start-date", synth_args.start_date, "First day (YYYY-MM-DD)");
    synth_cmd->add_option("--background", synth_args.background,
                          "Uniform background review count");
    synth_cmd->add_option("--plant", synth_args.plants,
                          "Planted group MxVxS (members x venues x spread); repeatable");
    synth_cmd->add_option("--friends-avg", synth_args.friends_avg,
                          "Mean friends per user (enables the user table)");
    synth_cmd->add_option("--reviews-out", synth_args.reviews_out,
                          "Review NDJSON output path or -")
        ->required();
    synth_cmd->add_option("--users-out", synth_args.users_out,
                          "User NDJSON output path (with --friends-avg)");
    synth_cmd->add_option("--truth-out", synth_args.truth_out,
                          "Ground-truth JSON output path");
    synth_cmd->callback([&] {
        SynthConfig config;
        config.seed = synth_args.seed;
        config.n_users = synth_args.users;
        config.n_venues = synth_args.venues;
        config.span_days = synth_args.span;
        config.start_date = synth_args.start_date;
        config.background_reviews = synth_args.background;
        config.friends_per_user = synth_args.friends_avg;
        for (const auto& plant : synth_args.plants)
            config.groups.push_back(parse_plant(plant));

        Output reviews(synth_args.reviews_out);
        std::optional<Output> users;
        if (!synth_args.users_out.empty()) users.emplace(synth_args.users_out);
        GroundTruth truth;
        write_synth_ndjson(config, reviews.stream(), users ? &users->stream() : nullptr,
                           &truth);
        reviews.finish();
        if (users) users->finish();
        if (!synth_args.truth_out.empty()) {
            Output out(synth_args.truth_out);
            out.stream() << ground_truth_to_json(truth) << "\n";
            out.finish();
        }
    });

    // --- ingest ------------------------------------------------------------
    auto* ingest_cmd =
        app.add_subcommand("ingest", "Ingest NDJSON reviews into a store file");
    struct {
        std::string reviews = "-";
        std::string users;
        std::string store_out;
        IngestOptions options;
    } ingest_args;
    ingest_cmd->add_option("--reviews", ingest_args.reviews,
                           "Review NDJSON path or - for stdin");
    ingest_cmd->add_option("--users", ingest_args.users, "User NDJSON path (friend lists)");
    ingest_cmd->add_option("--store-out", ingest_args.store_out, "Store output path")
        ->required();
    ingest_cmd->add_option("--user-field", ingest_args.options.schema.user_field,
                           "JSON field holding the user id");
    ingest_cmd->add_option("--venue-field", ingest_args.options.schema.venue_field,
                           "JSON field holding the venue id");
    ingest_cmd->add_option("--date-field", ingest_args.options.schema.date_field,
                           "JSON field holding the YYYY-MM-DD date");
    ingest_cmd->add_option("--stars-field", ingest_args.options.schema.stars_field,
                           "JSON field holding the star rating");
    ingest_cmd->add_option("--error-budget", ingest_args.options.error_budget,
                           "Tolerated fraction of malformed lines");
    ingest_cmd->callback([&] {
        Input reviews(ingest_args.reviews);
        IngestStats stats;
        ReviewStore store = ingest_reviews(reviews.stream(), ingest_args.options, &stats);
        if (!ingest_args.users.empty()) {
            Input users(ingest_args.users);
            IngestStats user_stats;
            ingest_users(store, users.stream(), ingest_args.options, &user_stats);
            std::cout << "users lines_read=" << user_stats.lines_read
                      << " records_kept=" << user_stats.records_kept
                      << " lines_skipped=" << user_stats.lines_skipped << "\n";
        }
        store.save(ingest_args.store_out);
        std::cout << "reviews lines_read=" << stats.lines_read
                  << " records_kept=" << stats.records_kept
                  << " duplicates_dropped=" << stats.duplicates_dropped
                  << " lines_skipped=" << stats.lines_skipped << "\n";
        std::cout << "store users=" << store.user_count()
                  << " venues=" << store.venue_count()
                  << " reviews=" << store.review_count() << "\n";
    });

    // --- build -------------------------------------------------------------
    auto* build_cmd = app.add_subcommand("build", "Build one (k,d) reviewer graph");
    struct {
        StoreArgs store;
        int k = 1;
        int d = 0;
        std::string mode = "unweighted";
        std::string tsv_out;
        std::string dot_out;
        int threads = 0;
        uint64_t pair_budget = 100000000;
    } build_args;
    build_args.store.attach(build_cmd);
    build_cmd->add_option("--k", build_args.k, "Minimum common venues")->required();
    build_cmd->add_option("--d", build_args.d, "Maximum day gap")->required();
    build_cmd->add_option("--mode", build_args.mode,
                          "unweighted | co-review | friend-intersection");
    build_cmd->add_option("--tsv-out", build_args.tsv_out, "Edge list TSV output");
    build_cmd->add_option("--dot-out", build_args.dot_out, "DOT output");
    build_cmd->add_option("--threads", build_args.threads, "0 = all cores");
    build_cmd->add_option("--pair-budget", build_args.pair_budget,
                          "Per-venue window pairing budget");
    build_cmd->callback([&] {
        const auto store = build_args.store.load();
        BuildOptions options{parse_mode(build_args.mode), build_args.threads,
                             build_args.pair_budget};
        const auto kd = build_kd_graph(store, {build_args.k, build_args.d}, options);
        if (!build_args.tsv_out.empty()) {
            Output out(build_args.tsv_out);
            write_edge_tsv(kd, store, out.stream());
            out.finish();
        }
        if (!build_args.dot_out.empty()) {
            Output out(build_args.dot_out);
            write_dot(kd, store, out.stream());
            out.finish();
        }
        std::cout << "graph k=" << build_args.k << " d=" << build_args.d
                  << " vertices=" << kd.graph.vertex_count()
                  << " edges=" << kd.graph.edge_count() << "\n";
    });

    // --- cliques / quasicliques ----------------------------------------------
    auto* cliques_cmd =
        app.add_subcommand("cliques", "Enumerate maximal cliques of a (k,d) graph");
    struct {
        StoreArgs store;
        int k = 1;
        int d = 0;
        int min_size = 3;
        int threads = 0;
        std::string out = "-";
    } cliques_args;
    cliques_args.store.attach(cliques_cmd);
    cliques_cmd->add_option("--k", cliques_args.k, "Minimum common venues")->required();
    cliques_cmd->add_option("--d", cliques_args.d, "Maximum day gap")->required();
    cliques_cmd->add_option("--min-size", cliques_args.min_size, "Smallest clique to emit");
    cliques_cmd->add_option("--threads", cliques_args.threads, "0 = all cores");
    cliques_cmd->add_option("--out", cliques_args.out, "Output path or -");
    cliques_cmd->callback([&] {
        const auto store = cliques_args.store.load();
        BuildOptions options;
        options.threads = cliques_args.threads;
        const auto kd = build_kd_graph(store, {cliques_args.k, cliques_args.d}, options);
        std::vector<std::string> lines;
        std::mutex mutex;
        maximal_cliques(kd.graph,
                        {cliques_args.min_size, resolve_threads(cliques_args.threads)},
                        [&](const VertexSet& clique) {
                            std::vector<std::string> exts;
                            for (VertexId v : clique)
                                exts.push_back(store.user_ext_id(kd.vertex_user[v]));
                            std::sort(exts.begin(), exts.end());
                            std::string line = exts.front();
                            for (size_t i = 1; i < exts.size(); ++i)
                                line += "\t" + exts[i];
                            std::lock_guard<std::mutex> lock(mutex);
                            lines.push_back(std::move(line));
                        });
        std::sort(lines.begin(), lines.end());
        Output out(cliques_args.out);
        for (const auto& line : lines) out.stream() << line << "\n";
        out.finish();
    });

    auto* quasi_cmd = app.add_subcommand(
        "quasicliques", "Enumerate theta-dense groups of a (k,d) graph");
    struct {
        StoreArgs store;
        int k = 1;
        int d = 0;
        std::string theta = "0.90";
        int min_size = 7;
        int max_size = 0;
        bool all = false;
        int threads = 0;
        std::string out = "-";
    } quasi_args;
    quasi_args.store.attach(quasi_cmd);
    quasi_cmd->add_option("--k", quasi_args.k, "Minimum common venues")->required();
    quasi_cmd->add_option("--d", quasi_args.d, "Maximum day gap")->required();
    quasi_cmd->add_option("--theta", quasi_args.theta, "Density threshold (0,1]");
    quasi_cmd->add_option("--min-size", quasi_args.min_size, "Smallest group to emit");
    quasi_cmd->add_option("--max-size", quasi_args.max_size, "Size cap (0 = none)");
    quasi_cmd->add_flag("--all", quasi_args.all,
                        "Emit every dense set, not only maximal ones");
    quasi_cmd->add_option("--threads", quasi_args.threads, "0 = all cores");
    quasi_cmd->add_option("--out", quasi_args.out, "Output path or -");
    quasi_cmd->callback([&] {
        const auto store = quasi_args.store.load();
        BuildOptions options;
        options.threads = quasi_args.threads;
        const auto kd = build_kd_graph(store, {quasi_args.k, quasi_args.d}, options);
        QuasiParams params;
        params.theta = parse_theta(quasi_args.theta);
        params.min_size = quasi_args.min_size;
        if (quasi_args.max_size > 0) params.max_size = quasi_args.max_size;
        std::vector<std::string> lines;
        std::mutex mutex;
        const auto sink = [&](const VertexSet& s) {
            std::vector<std::string> exts;
            for (VertexId v : s) exts.push_back(store.user_ext_id(kd.vertex_user[v]));
            std::sort(exts.begin(), exts.end());
            std::string line = exts.front();
            for (size_t i = 1; i < exts.size(); ++i) line += "\t" + exts[i];
            std::lock_guard<std::mutex> lock(mutex);
            lines.push_back(std::move(line));
        };
        const int threads = resolve_threads(quasi_args.threads);
        if (quasi_args.all)
            pseudo_cliques(kd.graph, params, sink, threads);
        else
            maximal_pseudo_cliques(kd.graph, params, sink, threads);
        std::sort(lines.begin(), lines.end());
        Output out(quasi_args.out);
        for (const auto& line : lines) out.stream() << line << "\n";
        out.finish();
    });

    // --- table ---------------------------------------------------------------
    auto* table_cmd =
        app.add_subcommand("table", "Count groups over a (k,d) x size grid");
    struct {
        StoreArgs store;
        std::string kind = "clique";
        std::vector<int> ks;
        std::vector<int> ds;
        std::vector<int> sizes;
        std::string theta = "0.90";
        std::string csv_out;
        std::string cumulative_out;
        bool pretty = false;
        int threads = 0;
    } table_args;
    table_args.store.attach(table_cmd);
    table_cmd->add_option("--kind", table_args.kind, "clique | quasiclique");
    table_cmd->add_option("--k", table_args.ks, "k values (comma separated)")
        ->required()
        ->delimiter(',');
    table_cmd->add_option("--d", table_args.ds, "d values (comma separated)")
        ->required()
        ->delimiter(',');
    table_cmd->add_option("--sizes", table_args.sizes, "Group sizes to report")
        ->required()
        ->delimiter(',');
    table_cmd->add_option("--theta", table_args.theta, "Density threshold for quasicliques");
    table_cmd->add_option("--csv-out", table_args.csv_out, "Exact-size CSV output");
    table_cmd->add_option("--cumulative-out", table_args.cumulative_out,
                          "Size >= s CSV output");
    table_cmd->add_flag("--pretty", table_args.pretty, "Print an aligned table to stdout");
    table_cmd->add_option("--threads", table_args.threads, "0 = all cores");
    table_cmd->callback([&] {
        const auto store = table_args.store.load();
        const GroupKind kind = parse_kind(table_args.kind);
        BuildOptions build;
        build.threads = table_args.threads;
        const auto table = build_count_table(
            store, table_args.ks, table_args.ds, table_args.sizes, kind,
            kind == GroupKind::kQuasiClique
                ? std::optional<Rational>(parse_theta(table_args.theta))
                : std::nullopt,
            build);
        if (!table_args.csv_out.empty()) {
            Output out(table_args.csv_out);
            write_count_csv(table, out.stream());
            out.finish();
        }
        if (!table_args.cumulative_out.empty()) {
            Output out(table_args.cumulative_out);
            write_cumulative_csv(table, out.stream());
            out.finish();
        }
        if (table_args.pretty)
            write_pretty_table(table, std::cout);
        else if (table_args.csv_out.empty())
            write_count_csv(table, std::cout);
    });

    // --- flag ------------------------------------------------------------------
    auto* flag_cmd =
        app.add_subcommand("flag", "List flagged groups with their evidence");
    struct {
        StoreArgs store;
        int k = 1;
        int d = 0;
        std::string kind = "clique";
        int min_size = 9;
        std::string theta = "0.90";
        int venue_cap = 50;
        bool full_evidence = false;
        int max_size = 0;
        int threads = 0;
        std::string out = "-";
    } flag_args;
    flag_args.store.attach(flag_cmd);
    flag_cmd->add_option("--k", flag_args.k, "Minimum common venues")->required();
    flag_cmd->add_option("--d", flag_args.d, "Maximum day gap")->required();
    flag_cmd->add_option("--kind", flag_args.kind, "clique | quasiclique");
    flag_cmd->add_option("--min-size", flag_args.min_size, "Smallest group to flag");
    flag_cmd->add_option("--theta", flag_args.theta, "Density threshold for quasicliques");
    flag_cmd->add_option("--venue-cap", flag_args.venue_cap,
                         "Witness venues listed per pair");
    flag_cmd->add_flag("--full-evidence", flag_args.full_evidence,
                       "List every witness venue");
    flag_cmd->add_option("--max-size", flag_args.max_size,
                         "Quasi-clique size cap (0 = none)");
    flag_cmd->add_option("--threads", flag_args.threads, "0 = all cores");
    flag_cmd->add_option("--out", flag_args.out, "JSON-lines output path or -");
    flag_cmd->callback([&] {
        const auto store = flag_args.store.load();
        const GroupKind kind = parse_kind(flag_args.kind);
        FlagOptions options;
        options.venue_cap = flag_args.venue_cap;
        options.full_evidence = flag_args.full_evidence;
        options.build.threads = flag_args.threads;
        if (flag_args.max_size > 0) options.max_size = flag_args.max_size;
        const auto groups = flag_groups(
            store, {flag_args.k, flag_args.d}, kind, flag_args.min_size,
            kind == GroupKind::kQuasiClique
                ? std::optional<Rational>(parse_theta(flag_args.theta))
                : std::nullopt,
            options);
        Output out(flag_args.out);
        write_groups_jsonl(groups, out.stream());
        out.finish();
    });

    // --- annotate ----------------------------------------------------------------
    auto* annotate_cmd =
        app.add_subcommand("annotate", "Join flagged groups with a user label file");
    struct {
        std::string groups;
        std::string labels;
        std::string graph;
        std::string store;
        std::string out = "-";
    } annotate_args;
    annotate_cmd->add_option("--groups", annotate_args.groups, "Group JSONL from `flag`")
        ->required();
    annotate_cmd->add_option("--labels", annotate_args.labels, "TSV user_id<TAB>label")
        ->required();
    annotate_cmd->add_option("--graph", annotate_args.graph,
                             "Edge TSV from `build`; adds whole-graph label stats");
    annotate_cmd->add_option("--store", annotate_args.store,
                             "Store file; labeled users outside it count as unknown");
    annotate_cmd->add_option("--out", annotate_args.out, "JSON output path or -");
    annotate_cmd->callback([&] {
        Input groups_in(annotate_args.groups);
        const auto groups = parse_groups_jsonl(groups_in.stream());
        Input labels_in(annotate_args.labels);
        const auto labels = load_labels(labels_in.stream());

        std::optional<std::vector<std::string>> graph_users;
        if (!annotate_args.graph.empty()) {
            Input graph_in(annotate_args.graph);
            std::vector<std::string> users;
            std::string line;
            while (std::getline(graph_in.stream(), line)) {
                if (line.empty()) continue;
                const auto tab1 = line.find('\t');
                const auto tab2 = line.find('\t', tab1 + 1);
                if (tab1 == std::string::npos || tab2 == std::string::npos)
                    throw Error("bad edge TSV line: " + line);
                users.push_back(line.substr(0, tab1));
                users.push_back(line.substr(tab1 + 1, tab2 - tab1 - 1));
            }
            graph_users = std::move(users);
        }
        std::optional<std::vector<std::string>> universe;
        if (!annotate_args.store.empty()) {
            const auto store = ReviewStore::load(annotate_args.store);
            std::vector<std::string> ids;
            ids.reserve(store.user_count());
            for (UserId u = 0; u < store.user_count(); ++u)
                ids.push_back(store.user_ext_id(u));
            universe = std::move(ids);
        }
        const auto stats = annotate(groups, labels, graph_users, universe);
        Output out(annotate_args.out);
        write_annotate_json(stats, out.stream());
        out.finish();
    });

    // --- export -----------------------------------------------------------------
    auto* export_cmd =
        app.add_subcommand("export", "Export the union graph of flagged groups");
    struct {
        StoreArgs store;
        std::string groups;
        std::string mode = "co-review";
        std::string format = "dot";
        std::string labels;
        std::string out = "-";
    } export_args;
    export_args.store.attach(export_cmd);
    export_cmd->add_option("--groups", export_args.groups, "Group JSONL from `flag`")
        ->required();
    export_cmd->add_option("--mode", export_args.mode,
                           "unweighted | co-review | friend-intersection");
    export_cmd->add_option("--format", export_args.format, "dot | tsv");
    export_cmd->add_option("--labels", export_args.labels, "TSV labels for node attrs");
    export_cmd->add_option("--out", export_args.out, "Output path or -");
    export_cmd->callback([&] {
        const auto store = export_args.store.load();
        Input groups_in(export_args.groups);
        const auto groups = parse_groups_jsonl(groups_in.stream());
        std::optional<LabelFile> labels;
        if (!export_args.labels.empty()) {
            Input labels_in(export_args.labels);
            labels = load_labels(labels_in.stream());
        }
        ExportFormat format;
        if (export_args.format == "dot")
            format = ExportFormat::kDot;
        else if (export_args.format == "tsv")
            format = ExportFormat::kTsv;
        else
            throw Error("unknown export format: " + export_args.format);
        Output out(export_args.out);
        export_group_graph(store, groups, parse_mode(export_args.mode), format,
                           labels ? &*labels : nullptr, out.stream());
        out.finish();
    });

    // --- verify -----------------------------------------------------------------
    auto* verify_cmd = app.add_subcommand(
        "verify", "Run the oracle differential suite, or validate group evidence");
    struct {
        int graphs = 100;
        uint64_t seed = 20240101;
        int threads = 1;
        std::string groups;
        std::string store;
    } verify_args;
    verify_cmd->add_option("--graphs", verify_args.graphs,
                           "Random graphs per edge probability");
    verify_cmd->add_option("--seed", verify_args.seed, "Differential suite seed");
    verify_cmd->add_option("--threads", verify_args.threads, "Enumeration threads");
    verify_cmd->add_option("--groups", verify_args.groups,
                           "Group JSONL to validate against --store");
    verify_cmd->add_option("--store", verify_args.store, "Store for evidence validation");
    verify_cmd->callback([&] {
        if (!verify_args.groups.empty() || !verify_args.store.empty()) {
            if (verify_args.groups.empty() || verify_args.store.empty())
                throw Error("evidence validation needs both --groups and --store");
            const auto store = ReviewStore::load(verify_args.store);
            Input groups_in(verify_args.groups);
            const auto groups = parse_groups_jsonl(groups_in.stream());
            const auto report = validate_groups(store, groups);
            std::cout << "groups=" << report.groups << " pairs=" << report.pairs
                      << " errors=" << report.errors.size() << "\n";
            for (const auto& error : report.errors) std::cout << error << "\n";
            if (!report.ok()) throw Error("group evidence failed validation");
            return;
        }
        VerifyOptions options;
        options.graphs = verify_args.graphs;
        options.seed = verify_args.seed;
        options.threads = verify_args.threads;
        const auto result = run_differential_suite(options);
        std::cout << "graphs_checked=" << result.graphs_checked
                  << " failures=" << result.failures.size() << "\n";
        for (const auto& failure : result.failures) std::cout << failure << "\n";
        if (!result.ok()) throw Error("differential suite found mismatches");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help, --version
        app.exit(e);
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
