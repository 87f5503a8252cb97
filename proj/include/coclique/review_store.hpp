#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coclique/date.hpp"

namespace coclique {

using UserId = uint32_t;
using VenueId = uint32_t;

// One review record. stars == 0 means "not present".
struct Review {
    UserId user;
    VenueId venue;
    DayNumber day;
    uint8_t stars;
};

// Field-name mapping for newline-delimited JSON input.
struct SchemaMap {
    std::string user_field = "user_id";
    std::string venue_field = "business_id";
    std::string date_field = "date";
    std::string stars_field = "stars";
    std::string friends_field = "friends";
};

struct IngestOptions {
    SchemaMap schema;
    // Fraction of lines allowed to be malformed before the ingest aborts.
    // At least one bad line is tolerated unless the budget is exactly 0.
    double error_budget = 0.001;
};

struct IngestStats {
    uint64_t lines_read = 0;
    uint64_t records_kept = 0;
    uint64_t duplicates_dropped = 0;
    uint64_t lines_skipped = 0;
};

// Deduplicated, venue-grouped, date-sorted column store of reviews with
// interned user/venue ids. Immutable once ingestion is finished; safe for
// unlimited concurrent readers.
class ReviewStore {
public:
    uint32_t user_count() const { return static_cast<uint32_t>(user_ids_.size()); }
    uint32_t venue_count() const { return static_cast<uint32_t>(venue_ids_.size()); }
    uint64_t review_count() const { return review_user_.size(); }

    const std::string& user_ext_id(UserId u) const { return user_ids_[u]; }
    const std::string& venue_ext_id(VenueId v) const { return venue_ids_[v]; }
    std::optional<UserId> find_user(std::string_view ext_id) const;
    std::optional<VenueId> find_venue(std::string_view ext_id) const;

    // Reviews of one venue, sorted by (day, user).
    struct VenueReviews {
        std::span<const UserId> users;
        std::span<const DayNumber> days;
        std::span<const uint8_t> stars;
    };
    VenueReviews venue_reviews(VenueId v) const;

    // Reviews of one user, sorted by (venue, day). Derived index, rebuilt
    // on load; not part of the serialized format.
    struct UserReviews {
        std::span<const VenueId> venues;
        std::span<const DayNumber> days;
    };
    UserReviews user_reviews(UserId u) const;
    uint64_t user_review_count(UserId u) const;

    // Friend lists are present only after ingest_users ran (or the store
    // was saved with them). Lists are sorted and deduplicated.
    bool friends_loaded() const { return friends_loaded_; }
    std::span<const UserId> friends(UserId u) const;

    bool operator==(const ReviewStore& other) const;

    // Versioned little-endian columnar file, magic "CSCT". Layout is
    // documented in docs/store_format.md; save is byte-deterministic.
    void save(const std::string& path) const;
    static ReviewStore load(const std::string& path);

private:
    friend ReviewStore ingest_reviews(std::istream&, const IngestOptions&, IngestStats*);
    friend void ingest_users(ReviewStore&, std::istream&, const IngestOptions&, IngestStats*);

    UserId intern_user(std::string_view ext_id);
    VenueId intern_venue(std::string_view ext_id);
    void finalize_reviews(std::vector<Review>&& reviews, IngestStats* stats);
    void rebuild_user_index();

    std::vector<std::string> user_ids_;
    std::vector<std::string> venue_ids_;
    std::unordered_map<std::string, UserId> user_index_;
    std::unordered_map<std::string, VenueId> venue_index_;

    // Venue-grouped review columns.
    std::vector<uint64_t> venue_offsets_; // venue_count()+1
    std::vector<UserId> review_user_;
    std::vector<DayNumber> review_day_;
    std::vector<uint8_t> review_stars_;

    bool friends_loaded_ = false;
    std::vector<uint64_t> friend_offsets_; // user_count()+1 when loaded
    std::vector<UserId> friend_ids_;

    // Derived per-user index.
    std::vector<uint64_t> user_offsets_;
    std::vector<VenueId> user_review_venue_;
    std::vector<DayNumber> user_review_day_;
};

// Streams review records from newline-delimited JSON. Malformed lines are
// counted and skipped up to the error budget, then the ingest aborts with
// the line number of the last failure. Blank lines are ignored entirely.
ReviewStore ingest_reviews(std::istream& source, const IngestOptions& options = {},
                           IngestStats* stats = nullptr);

// Attaches friend lists from `{"user_id": ..., "friends": [...]}` lines.
// Users referenced but not yet known are interned on sight. Repeated lines
// for one user merge their lists.
void ingest_users(ReviewStore& store, std::istream& source,
                  const IngestOptions& options = {}, IngestStats* stats = nullptr);

} // namespace coclique
