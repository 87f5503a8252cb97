#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "coclique/date.hpp"
#include "coclique/error.hpp"
#include "coclique/review_store.hpp"

using namespace coclique;

namespace {

std::string review_line(const std::string& user, const std::string& venue,
                        const std::string& date, int stars = 4) {
    return "{\"user_id\":\"" + user + "\",\"business_id\":\"" + venue +
           "\",\"date\":\"" + date + "\",\"stars\":" + std::to_string(stars) + "}\n";
}

ReviewStore ingest_text(const std::string& text, const IngestOptions& options = {},
                        IngestStats* stats = nullptr) {
    std::istringstream in(text);
    return ingest_reviews(in, options, stats);
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("coclique_test_" + name);
}

} // namespace

TEST_SUITE("ingest") {

TEST_CASE("exact duplicates collapse to the first record") {
    IngestStats stats;
    const auto store = ingest_text(review_line("a", "x", "2012-01-05") +
                                       review_line("b", "x", "2012-01-06") +
                                       review_line("a", "x", "2012-01-05", 1),
                                   {}, &stats);
    CHECK(store.review_count() == 2);
    CHECK(stats.lines_read == 3);
    CHECK(stats.records_kept == 2);
    CHECK(stats.duplicates_dropped == 1);
    CHECK(stats.lines_skipped == 0);
    // First occurrence wins, including its stars.
    const auto group = store.venue_reviews(*store.find_venue("x"));
    CHECK(group.stars[0] == 4);
}

TEST_CASE("same user, same venue, different dates are distinct records") {
    const auto store = ingest_text(review_line("a", "x", "2012-01-05") +
                                   review_line("a", "x", "2012-01-07"));
    CHECK(store.review_count() == 2);
}

TEST_CASE("empty input yields an empty store") {
    IngestStats stats;
    const auto store = ingest_text("", {}, &stats);
    CHECK(store.review_count() == 0);
    CHECK(store.user_count() == 0);
    CHECK(store.venue_count() == 0);
    CHECK(stats.lines_read == 0);
    CHECK(stats.records_kept == 0);
    CHECK(stats.duplicates_dropped == 0);
    CHECK(stats.lines_skipped == 0);
}

TEST_CASE("malformed lines are counted and skipped") {
    IngestStats stats;
    IngestOptions options;
    options.error_budget = 0.5;
    const auto store = ingest_text(review_line("a", "x", "2012-01-05") +
                                       "not json\n" +
                                       "{\"user_id\":\"b\"}\n" +
                                       review_line("b", "x", "2012-02-30") + // bad date
                                       review_line("c", "x", "2012-01-05", 9) + // bad stars
                                       review_line("d", "x", "2012-01-06"),
                                   options, &stats);
    CHECK(store.review_count() == 2);
    CHECK(stats.lines_read == 6);
    CHECK(stats.lines_skipped == 4);
    CHECK(stats.records_kept == 2);
    CHECK(stats.lines_read ==
          stats.records_kept + stats.duplicates_dropped + stats.lines_skipped);
}

TEST_CASE("stars are optional and fractional star values parse when integral") {
    const auto store = ingest_text(
        "{\"user_id\":\"a\",\"business_id\":\"x\",\"date\":\"2012-01-05\"}\n"
        "{\"user_id\":\"b\",\"business_id\":\"x\",\"date\":\"2012-01-06\",\"stars\":5.0}\n");
    REQUIRE(store.review_count() == 2);
    const auto group = store.venue_reviews(0);
    CHECK(group.stars[0] == 0); // absent
    CHECK(group.stars[1] == 5);
}

TEST_CASE("error budget aborts with the failing line number") {
    std::string text;
    for (int i = 0; i < 2000; ++i)
        text += review_line("u" + std::to_string(i), "x", "2012-01-05");
    for (int i = 0; i < 17; ++i) text += "garbage " + std::to_string(i) + "\n";
    CHECK_THROWS_WITH_AS(ingest_text(text), doctest::Contains("line 2017"), Error);

    IngestOptions zero;
    zero.error_budget = 0;
    CHECK_THROWS_AS(ingest_text("junk\n", zero), Error);
    // A handful of bad lines in a small file stays within the default budget.
    IngestStats stats;
    CHECK_NOTHROW(ingest_text(review_line("a", "x", "2012-01-05") + "junk\n", {}, &stats));
}

TEST_CASE("schema field names are remappable") {
    IngestOptions options;
    options.schema.user_field = "reviewer";
    options.schema.venue_field = "place";
    options.schema.date_field = "when";
    const auto store = ingest_text(
        "{\"reviewer\":\"a\",\"place\":\"x\",\"when\":\"2012-01-05\"}\n", options);
    CHECK(store.review_count() == 1);
    CHECK(store.find_user("a").has_value());
}

TEST_CASE("generated corpus matches an independent sort/group oracle") {
    // 100k reviews over 5k venues; the oracle below shares nothing with the
    // store implementation.
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> user_dist(0, 19999);
    std::uniform_int_distribution<int> venue_dist(0, 4999);
    std::uniform_int_distribution<int> day_offset(0, 3650);
    const DayNumber base = *parse_day("2005-01-01");

    std::string text;
    text.reserve(100000 * 80);
    std::set<std::tuple<std::string, std::string, DayNumber>> oracle_unique;
    std::map<std::string, std::vector<std::pair<DayNumber, std::string>>> oracle_groups;
    for (int i = 0; i < 100000; ++i) {
        const std::string user = "u" + std::to_string(user_dist(rng));
        const std::string venue = "v" + std::to_string(venue_dist(rng));
        const DayNumber day = base + day_offset(rng);
        text += review_line(user, venue, format_day(day));
        if (oracle_unique.insert({user, venue, day}).second)
            oracle_groups[venue].emplace_back(day, user);
    }
    for (auto& [venue, group] : oracle_groups) std::sort(group.begin(), group.end());

    IngestStats stats;
    const auto store = ingest_text(text, {}, &stats);
    CHECK(stats.lines_read == 100000);
    CHECK(stats.records_kept == oracle_unique.size());
    CHECK(stats.records_kept + stats.duplicates_dropped == 100000);

    uint64_t group_total = 0;
    for (VenueId v = 0; v < store.venue_count(); ++v) {
        const auto group = store.venue_reviews(v);
        group_total += group.users.size();
        const auto& expected = oracle_groups.at(store.venue_ext_id(v));
        REQUIRE(group.users.size() == expected.size());
        // Same records (store orders users by interned id, the oracle by
        // external id, so compare as sorted (day, ext) pairs).
        std::vector<std::pair<DayNumber, std::string>> actual;
        for (size_t i = 0; i < group.users.size(); ++i)
            actual.emplace_back(group.days[i], store.user_ext_id(group.users[i]));
        std::sort(actual.begin(), actual.end());
        CHECK(actual == expected);
        // The store's own invariant: sorted by (day, interned user id).
        for (size_t i = 1; i < group.users.size(); ++i)
            CHECK(std::tie(group.days[i - 1], group.users[i - 1]) <
                  std::tie(group.days[i], group.users[i]));
    }
    CHECK(group_total == stats.records_kept);
}

TEST_CASE("ingest_users interns unknown friends and stores sorted lists") {
    auto store = ingest_text(review_line("a", "x", "2012-01-05"));
    std::istringstream users(
        "{\"user_id\":\"a\",\"friends\":[\"c\",\"b\",\"c\"]}\n"
        "{\"user_id\":\"d\",\"friends\":[]}\n");
    ingest_users(store, users);
    REQUIRE(store.friends_loaded());
    REQUIRE(store.find_user("b").has_value()); // interned on sight
    REQUIRE(store.find_user("c").has_value());
    const auto friends = store.friends(*store.find_user("a"));
    REQUIRE(friends.size() == 2);
    // Sorted by interned UserId, deduplicated.
    CHECK(std::is_sorted(friends.begin(), friends.end()));
    const std::set<std::string> exts = {store.user_ext_id(friends[0]),
                                        store.user_ext_id(friends[1])};
    CHECK(exts == std::set<std::string>{"b", "c"});
    CHECK(store.friends(*store.find_user("d")).empty());
    // No line for "x"-reviewer beyond a: empty list, not an error.
    CHECK(store.user_review_count(*store.find_user("b")) == 0);
}

TEST_CASE("repeated user lines merge friend lists") {
    auto store = ingest_text(review_line("a", "x", "2012-01-05"));
    std::istringstream users(
        "{\"user_id\":\"a\",\"friends\":[\"b\"]}\n"
        "{\"user_id\":\"a\",\"friends\":[\"c\",\"b\"]}\n");
    ingest_users(store, users);
    CHECK(store.friends(*store.find_user("a")).size() == 2);
}

TEST_CASE("random friend lists equal a sort+dedup oracle") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> id_dist(0, 499);
    std::uniform_int_distribution<int> len_dist(0, 12);

    std::string text;
    std::map<std::string, std::set<std::string>> oracle;
    for (int i = 0; i < 1000; ++i) {
        const std::string user = "u" + std::to_string(i);
        text += "{\"user_id\":\"" + user + "\",\"friends\":[";
        const int len = len_dist(rng);
        for (int j = 0; j < len; ++j) {
            const std::string f = "u" + std::to_string(id_dist(rng));
            if (j) text += ",";
            text += "\"" + f + "\"";
            oracle[user].insert(f);
        }
        text += "]}\n";
    }
    auto store = ingest_text("");
    std::istringstream users(text);
    ingest_users(store, users);
    for (const auto& [user, expected] : oracle) {
        const auto friends = store.friends(*store.find_user(user));
        REQUIRE(friends.size() == expected.size());
        CHECK(std::is_sorted(friends.begin(), friends.end()));
        std::set<std::string> actual;
        for (UserId f : friends) actual.insert(store.user_ext_id(f));
        CHECK(actual == expected);
    }
}

TEST_CASE("store round-trips through its file format") {
    const auto path = temp_file("roundtrip.csct");

    SUBCASE("empty store") {
        const auto store = ingest_text("");
        store.save(path.string());
        CHECK(ReviewStore::load(path.string()) == store);
    }

    SUBCASE("small store field for field") {
        auto store = ingest_text(review_line("a", "x", "2012-01-05") +
                                 review_line("b", "x", "2012-01-06", 1) +
                                 review_line("c", "y", "2012-02-01") +
                                 review_line("a", "y", "2012-02-03") +
                                 review_line("d", "z", "2013-05-05") +
                                 review_line("e", "z", "2013-05-06") +
                                 review_line("f", "z", "2013-05-07") +
                                 review_line("g", "w", "2014-01-01") +
                                 review_line("h", "w", "2014-01-02") +
                                 review_line("i", "w", "2014-01-03"));
        std::istringstream users("{\"user_id\":\"a\",\"friends\":[\"b\",\"c\"]}\n");
        ingest_users(store, users);
        store.save(path.string());
        const auto loaded = ReviewStore::load(path.string());
        CHECK(loaded == store);
        CHECK(loaded.friends_loaded());
        CHECK(loaded.user_ext_id(0) == store.user_ext_id(0));
        CHECK(loaded.venue_reviews(0).days.size() == store.venue_reviews(0).days.size());
    }

    std::filesystem::remove(path);
}

TEST_CASE("second save is byte-identical on a large generated store") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> user_dist(0, 30000);
    std::uniform_int_distribution<int> venue_dist(0, 2000);
    std::uniform_int_distribution<int> day_offset(0, 2000);
    const DayNumber base = *parse_day("2008-01-01");
    std::string text;
    text.reserve(100000 * 70);
    for (int i = 0; i < 100000; ++i)
        text += review_line("u" + std::to_string(user_dist(rng)),
                            "v" + std::to_string(venue_dist(rng)),
                            format_day(base + day_offset(rng)));
    const auto store = ingest_text(text);

    const auto path1 = temp_file("bytes1.csct");
    const auto path2 = temp_file("bytes2.csct");
    store.save(path1.string());
    const auto loaded = ReviewStore::load(path1.string());
    CHECK(loaded == store);
    loaded.save(path2.string());

    std::ifstream f1(path1, std::ios::binary), f2(path2, std::ios::binary);
    const std::string bytes1((std::istreambuf_iterator<char>(f1)), {});
    const std::string bytes2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(bytes1 == bytes2);
    CHECK(!bytes1.empty());
    std::filesystem::remove(path1);
    std::filesystem::remove(path2);
}

TEST_CASE("load rejects version mismatch, truncation, and bad magic") {
    const auto path = temp_file("corrupt.csct");
    const auto store = ingest_text(review_line("a", "x", "2012-01-05"));
    store.save(path.string());

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    in.close();

    SUBCASE("version mismatch names both versions") {
        bytes[4] = 9; // version little-endian low byte
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_WITH_AS(ReviewStore::load(path.string()),
                             doctest::Contains("9"), Error);
    }

    SUBCASE("truncated file is fatal") {
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
        out.close();
        CHECK_THROWS_WITH_AS(ReviewStore::load(path.string()),
                             doctest::Contains("truncated"), Error);
    }

    SUBCASE("bad magic is fatal") {
        bytes[0] = 'X';
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_AS(ReviewStore::load(path.string()), Error);
    }

    std::filesystem::remove(path);
}

TEST_CASE("counter identity holds over random valid/invalid mixes") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int round = 0; round < 20; ++round) {
        std::string text;
        uint64_t lines = 0;
        for (int i = 0; i < 400; ++i) {
            const double r = coin(rng);
            if (r < 0.05) {
                text += "!broken!\n";
            } else if (r < 0.08) {
                text += "\n"; // blank: ignored entirely, not counted
                continue;
            } else if (r < 0.2) {
                text += review_line("dup", "dup", "2012-01-05");
            } else {
                text += review_line("u" + std::to_string(i % 37), "v" + std::to_string(i % 11),
                                    format_day(15000 + i % 50));
            }
            ++lines;
        }
        IngestStats stats;
        IngestOptions options;
        options.error_budget = 0.2;
        const auto store = ingest_text(text, options, &stats);
        CHECK(stats.lines_read == lines);
        CHECK(stats.lines_read ==
              stats.records_kept + stats.duplicates_dropped + stats.lines_skipped);
        CHECK(store.review_count() == stats.records_kept);
        // Store invariants: groups sorted, offsets consistent.
        for (VenueId v = 0; v < store.venue_count(); ++v) {
            const auto group = store.venue_reviews(v);
            for (size_t i = 1; i < group.users.size(); ++i)
                CHECK(std::tie(group.days[i - 1], group.users[i - 1]) <
                      std::tie(group.days[i], group.users[i]));
        }
    }
}

} // TEST_SUITE
