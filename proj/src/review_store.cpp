#include "coclique/review_store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

#include <json.hpp>

#include "coclique/error.hpp"

namespace coclique {

std::optional<UserId> ReviewStore::find_user(std::string_view ext_id) const {
    auto it = user_index_.find(std::string(ext_id));
    if (it == user_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<VenueId> ReviewStore::find_venue(std::string_view ext_id) const {
    auto it = venue_index_.find(std::string(ext_id));
    if (it == venue_index_.end()) return std::nullopt;
    return it->second;
}

ReviewStore::VenueReviews ReviewStore::venue_reviews(VenueId v) const {
    const uint64_t begin = venue_offsets_[v];
    const uint64_t count = venue_offsets_[v + 1] - begin;
    return {{review_user_.data() + begin, count},
            {review_day_.data() + begin, count},
            {review_stars_.data() + begin, count}};
}

ReviewStore::UserReviews ReviewStore::user_reviews(UserId u) const {
    const uint64_t begin = user_offsets_[u];
    const uint64_t count = user_offsets_[u + 1] - begin;
    return {{user_review_venue_.data() + begin, count},
            {user_review_day_.data() + begin, count}};
}

uint64_t ReviewStore::user_review_count(UserId u) const {
    return user_offsets_[u + 1] - user_offsets_[u];
}

std::span<const UserId> ReviewStore::friends(UserId u) const {
    if (!friends_loaded_) return {};
    const uint64_t begin = friend_offsets_[u];
    return {friend_ids_.data() + begin, friend_offsets_[u + 1] - begin};
}

bool ReviewStore::operator==(const ReviewStore& other) const {
    return user_ids_ == other.user_ids_ && venue_ids_ == other.venue_ids_ &&
           venue_offsets_ == other.venue_offsets_ &&
           review_user_ == other.review_user_ && review_day_ == other.review_day_ &&
           review_stars_ == other.review_stars_ &&
           friends_loaded_ == other.friends_loaded_ &&
           friend_offsets_ == other.friend_offsets_ && friend_ids_ == other.friend_ids_;
}

UserId ReviewStore::intern_user(std::string_view ext_id) {
    auto it = user_index_.find(std::string(ext_id));
    if (it != user_index_.end()) return it->second;
    const UserId id = static_cast<UserId>(user_ids_.size());
    user_ids_.emplace_back(ext_id);
    user_index_.emplace(user_ids_.back(), id);
    return id;
}

VenueId ReviewStore::intern_venue(std::string_view ext_id) {
    auto it = venue_index_.find(std::string(ext_id));
    if (it != venue_index_.end()) return it->second;
    const VenueId id = static_cast<VenueId>(venue_ids_.size());
    venue_ids_.emplace_back(ext_id);
    venue_index_.emplace(venue_ids_.back(), id);
    return id;
}

void ReviewStore::finalize_reviews(std::vector<Review>&& reviews, IngestStats* stats) {
    // Group by venue, order by (day, user) inside each group; exact
    // (user, venue, day) duplicates collapse to their first occurrence
    // (stable sort keeps input order within equal keys).
    std::stable_sort(reviews.begin(), reviews.end(), [](const Review& a, const Review& b) {
        return std::tie(a.venue, a.day, a.user) < std::tie(b.venue, b.day, b.user);
    });
    const size_t before = reviews.size();
    reviews.erase(std::unique(reviews.begin(), reviews.end(),
                              [](const Review& a, const Review& b) {
                                  return a.venue == b.venue && a.day == b.day &&
                                         a.user == b.user;
                              }),
                  reviews.end());
    if (stats) {
        stats->duplicates_dropped = before - reviews.size();
        stats->records_kept = reviews.size();
    }

    venue_offsets_.assign(venue_count() + 1, 0);
    for (const Review& r : reviews) ++venue_offsets_[r.venue + 1];
    for (uint32_t v = 0; v < venue_count(); ++v) venue_offsets_[v + 1] += venue_offsets_[v];

    review_user_.resize(reviews.size());
    review_day_.resize(reviews.size());
    review_stars_.resize(reviews.size());
    for (size_t i = 0; i < reviews.size(); ++i) {
        review_user_[i] = reviews[i].user;
        review_day_[i] = reviews[i].day;
        review_stars_[i] = reviews[i].stars;
    }

    rebuild_user_index();
}

void ReviewStore::rebuild_user_index() {
    user_offsets_.assign(user_count() + 1, 0);
    for (UserId u : review_user_) ++user_offsets_[u + 1];
    for (uint32_t u = 0; u < user_count(); ++u) user_offsets_[u + 1] += user_offsets_[u];

    user_review_venue_.resize(review_user_.size());
    user_review_day_.resize(review_user_.size());
    std::vector<uint64_t> cursor(user_offsets_.begin(), user_offsets_.end() - 1);
    for (uint32_t v = 0; v < venue_count(); ++v) {
        for (uint64_t i = venue_offsets_[v]; i < venue_offsets_[v + 1]; ++i) {
            const UserId u = review_user_[i];
            user_review_venue_[cursor[u]] = v;
            user_review_day_[cursor[u]] = review_day_[i];
            ++cursor[u];
        }
    }
    // Venue-major fill already yields venue-sorted runs per user; order
    // days within each (user, venue) run.
    for (uint32_t u = 0; u < user_count(); ++u) {
        uint64_t i = user_offsets_[u];
        const uint64_t end = user_offsets_[u + 1];
        while (i < end) {
            uint64_t j = i + 1;
            while (j < end && user_review_venue_[j] == user_review_venue_[i]) ++j;
            std::sort(user_review_day_.begin() + i, user_review_day_.begin() + j);
            i = j;
        }
    }
}

namespace {

class LineBudget {
public:
    explicit LineBudget(double fraction) : fraction_(fraction) {}

    // Returns false once the skip budget is exhausted. The budget is a
    // fraction of the lines read so far, with a small absolute floor so
    // a burst at the top of a short file does not abort immediately.
    bool allow(uint64_t lines_read, uint64_t lines_skipped) const {
        if (fraction_ <= 0.0) return lines_skipped == 0;
        const uint64_t allowed = std::max<uint64_t>(
            kMinAllowance,
            static_cast<uint64_t>(fraction_ * static_cast<double>(lines_read)));
        return lines_skipped <= allowed;
    }

private:
    static constexpr uint64_t kMinAllowance = 16;
    double fraction_;
};

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t") == std::string::npos;
}

// stars may arrive as an integer or an integral double (4 vs 4.0).
std::optional<uint8_t> parse_stars(const nlohmann::json& value) {
    if (value.is_null()) return 0;
    double d;
    if (value.is_number_integer())
        d = static_cast<double>(value.get<int64_t>());
    else if (value.is_number_float())
        d = value.get<double>();
    else
        return std::nullopt;
    if (d != std::floor(d) || d < 1 || d > 5) return std::nullopt;
    return static_cast<uint8_t>(d);
}

} // namespace

ReviewStore ingest_reviews(std::istream& source, const IngestOptions& options,
                           IngestStats* stats) {
    if (!source.good()) throw Error("ingest: unreadable review source");

    ReviewStore store;
    std::vector<Review> reviews;
    IngestStats local;
    const LineBudget budget(options.error_budget);
    const SchemaMap& schema = options.schema;

    std::string line;
    uint64_t line_number = 0;
    while (read_line(source, line)) {
        ++line_number;
        if (blank(line)) continue;
        ++local.lines_read;

        const auto fail = [&]() {
            ++local.lines_skipped;
            if (!budget.allow(local.lines_read, local.lines_skipped))
                throw Error("ingest: error budget exceeded at line " +
                            std::to_string(line_number));
        };

        const nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (!obj.is_object()) {
            fail();
            continue;
        }
        const auto user_it = obj.find(schema.user_field);
        const auto venue_it = obj.find(schema.venue_field);
        const auto date_it = obj.find(schema.date_field);
        if (user_it == obj.end() || !user_it->is_string() ||
            user_it->get_ref<const std::string&>().empty() ||
            venue_it == obj.end() || !venue_it->is_string() ||
            venue_it->get_ref<const std::string&>().empty() ||
            date_it == obj.end() || !date_it->is_string()) {
            fail();
            continue;
        }
        const auto day = parse_day(date_it->get_ref<const std::string&>());
        if (!day) {
            fail();
            continue;
        }
        uint8_t stars = 0;
        if (auto stars_it = obj.find(schema.stars_field); stars_it != obj.end()) {
            const auto parsed = parse_stars(*stars_it);
            if (!parsed) {
                fail();
                continue;
            }
            stars = *parsed;
        }
        reviews.push_back({store.intern_user(user_it->get_ref<const std::string&>()),
                           store.intern_venue(venue_it->get_ref<const std::string&>()),
                           *day, stars});
    }
    if (source.bad()) throw Error("ingest: I/O failure while reading reviews");

    store.finalize_reviews(std::move(reviews), &local);
    if (stats) *stats = local;
    return store;
}

void ingest_users(ReviewStore& store, std::istream& source, const IngestOptions& options,
                  IngestStats* stats) {
    if (!source.good()) throw Error("ingest: unreadable user source");

    IngestStats local;
    const LineBudget budget(options.error_budget);
    const SchemaMap& schema = options.schema;

    // Friend sets under construction, keyed by UserId.
    std::unordered_map<UserId, std::vector<UserId>> lists;

    std::string line;
    uint64_t line_number = 0;
    while (read_line(source, line)) {
        ++line_number;
        if (blank(line)) continue;
        ++local.lines_read;

        const auto fail = [&]() {
            ++local.lines_skipped;
            if (!budget.allow(local.lines_read, local.lines_skipped))
                throw Error("ingest: error budget exceeded at line " +
                            std::to_string(line_number));
        };

        const nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (!obj.is_object()) {
            fail();
            continue;
        }
        const auto user_it = obj.find(schema.user_field);
        if (user_it == obj.end() || !user_it->is_string() ||
            user_it->get_ref<const std::string&>().empty()) {
            fail();
            continue;
        }
        const auto friends_it = obj.find(schema.friends_field);
        if (friends_it != obj.end() && !friends_it->is_array() && !friends_it->is_null()) {
            fail();
            continue;
        }
        bool ok = true;
        std::vector<std::string_view> friend_exts;
        if (friends_it != obj.end() && friends_it->is_array()) {
            friend_exts.reserve(friends_it->size());
            for (const auto& f : *friends_it) {
                if (!f.is_string() || f.get_ref<const std::string&>().empty()) {
                    ok = false;
                    break;
                }
                friend_exts.push_back(f.get_ref<const std::string&>());
            }
        }
        if (!ok) {
            fail();
            continue;
        }
        const UserId u = store.intern_user(user_it->get_ref<const std::string&>());
        auto& list = lists[u];
        for (std::string_view ext : friend_exts) list.push_back(store.intern_user(ext));
        ++local.records_kept;
    }
    if (source.bad()) throw Error("ingest: I/O failure while reading users");

    store.friends_loaded_ = true;
    store.friend_offsets_.assign(store.user_count() + 1, 0);
    for (auto& [u, list] : lists) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        store.friend_offsets_[u + 1] = list.size();
    }
    for (uint32_t u = 0; u < store.user_count(); ++u)
        store.friend_offsets_[u + 1] += store.friend_offsets_[u];
    store.friend_ids_.resize(store.friend_offsets_.back());
    for (const auto& [u, list] : lists)
        std::copy(list.begin(), list.end(),
                  store.friend_ids_.begin() + store.friend_offsets_[u]);

    // New users may have been interned; the per-user review index must
    // cover them (with empty ranges).
    store.rebuild_user_index();
    if (stats) *stats = local;
}

// ---------------------------------------------------------------------------
// Store file: magic "CSCT", version u16, little-endian columnar sections.
// See docs/store_format.md for the byte-exact layout.

namespace {

constexpr char kMagic[4] = {'C', 'S', 'C', 'T'};
constexpr uint16_t kVersion = 1;
constexpr uint64_t kFlagFriendsLoaded = 1;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw Error("store: cannot open for writing: " + path);
    }

    void u8(uint8_t v) { raw(&v, 1); }
    void u16(uint16_t v) {
        uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
        raw(b, 2);
    }
    void u64(uint64_t v) {
        uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
        raw(b, 8);
    }
    void u32(uint32_t v) {
        uint8_t b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
        raw(b, 4);
    }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void raw(const void* data, size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }

    void u64_vec(const std::vector<uint64_t>& v) {
        for (uint64_t x : v) u64(x);
    }
    void u32_vec(const std::vector<uint32_t>& v) {
        for (uint32_t x : v) u32(x);
    }
    void i32_vec(const std::vector<int32_t>& v) {
        for (int32_t x : v) i32(x);
    }
    void string_table(const std::vector<std::string>& strings) {
        uint64_t offset = 0;
        u64(offset);
        for (const auto& s : strings) {
            offset += s.size();
            u64(offset);
        }
        for (const auto& s : strings) raw(s.data(), s.size());
    }

    void close() {
        out_.flush();
        if (!out_) throw Error("store: write failure");
        out_.close();
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw Error("store: cannot open for reading: " + path);
    }

    uint8_t u8() {
        uint8_t v;
        raw(&v, 1);
        return v;
    }
    uint16_t u16() {
        uint8_t b[2];
        raw(b, 2);
        return static_cast<uint16_t>(b[0] | (b[1] << 8));
    }
    uint32_t u32() {
        uint8_t b[4];
        raw(b, 4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
        return v;
    }
    uint64_t u64() {
        uint8_t b[8];
        raw(b, 8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    void raw(void* data, size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in_.gcount()) != n)
            throw Error("store: truncated file");
    }

    std::vector<uint64_t> u64_vec(size_t n) {
        std::vector<uint64_t> v(n);
        for (auto& x : v) x = u64();
        return v;
    }
    std::vector<uint32_t> u32_vec(size_t n) {
        std::vector<uint32_t> v(n);
        for (auto& x : v) x = u32();
        return v;
    }
    std::vector<int32_t> i32_vec(size_t n) {
        std::vector<int32_t> v(n);
        for (auto& x : v) x = i32();
        return v;
    }
    std::vector<std::string> string_table(size_t count) {
        const auto offsets = u64_vec(count + 1);
        if (offsets[0] != 0) throw Error("store: corrupt string table");
        std::vector<std::string> strings(count);
        for (size_t i = 0; i < count; ++i) {
            if (offsets[i + 1] < offsets[i]) throw Error("store: corrupt string table");
            strings[i].resize(offsets[i + 1] - offsets[i]);
            if (!strings[i].empty()) raw(strings[i].data(), strings[i].size());
        }
        return strings;
    }

    bool at_eof() {
        in_.peek();
        return in_.eof();
    }

private:
    std::ifstream in_;
};

} // namespace

void ReviewStore::save(const std::string& path) const {
    Writer w(path);
    w.raw(kMagic, 4);
    w.u16(kVersion);
    w.u16(0); // reserved
    w.u64(friends_loaded_ ? kFlagFriendsLoaded : 0);
    w.u64(user_count());
    w.u64(venue_count());
    w.u64(review_count());

    w.string_table(user_ids_);
    w.string_table(venue_ids_);

    if (friends_loaded_) {
        w.u64_vec(friend_offsets_);
        w.u32_vec(friend_ids_);
    }

    w.u64_vec(venue_offsets_);
    w.u32_vec(review_user_);
    w.i32_vec(review_day_);
    w.raw(review_stars_.data(), review_stars_.size());
    w.close();
}

ReviewStore ReviewStore::load(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.raw(magic, 4);
    if (std::string_view(magic, 4) != std::string_view(kMagic, 4))
        throw Error("store: bad magic (not a CSCT store file)");
    const uint16_t version = r.u16();
    if (version != kVersion)
        throw Error("store: version mismatch: file has " + std::to_string(version) +
                    ", this build reads " + std::to_string(kVersion));
    r.u16(); // reserved
    const uint64_t flags = r.u64();
    const uint64_t n_users = r.u64();
    const uint64_t n_venues = r.u64();
    const uint64_t n_reviews = r.u64();

    ReviewStore store;
    store.user_ids_ = r.string_table(n_users);
    store.venue_ids_ = r.string_table(n_venues);
    for (size_t i = 0; i < store.user_ids_.size(); ++i)
        store.user_index_.emplace(store.user_ids_[i], static_cast<UserId>(i));
    for (size_t i = 0; i < store.venue_ids_.size(); ++i)
        store.venue_index_.emplace(store.venue_ids_[i], static_cast<VenueId>(i));
    if (store.user_index_.size() != n_users || store.venue_index_.size() != n_venues)
        throw Error("store: duplicate external ids in id table");

    store.friends_loaded_ = (flags & kFlagFriendsLoaded) != 0;
    if (store.friends_loaded_) {
        store.friend_offsets_ = r.u64_vec(n_users + 1);
        if (store.friend_offsets_.front() != 0 ||
            !std::is_sorted(store.friend_offsets_.begin(), store.friend_offsets_.end()))
            throw Error("store: corrupt friend offsets");
        store.friend_ids_ = r.u32_vec(store.friend_offsets_.back());
        for (UserId f : store.friend_ids_)
            if (f >= n_users) throw Error("store: friend id out of range");
    }

    store.venue_offsets_ = r.u64_vec(n_venues + 1);
    if (store.venue_offsets_.front() != 0 || store.venue_offsets_.back() != n_reviews ||
        !std::is_sorted(store.venue_offsets_.begin(), store.venue_offsets_.end()))
        throw Error("store: corrupt venue offsets");
    store.review_user_ = r.u32_vec(n_reviews);
    store.review_day_ = r.i32_vec(n_reviews);
    store.review_stars_.resize(n_reviews);
    if (n_reviews > 0) r.raw(store.review_stars_.data(), n_reviews);
    if (!r.at_eof()) throw Error("store: trailing bytes after last section");

    for (UserId u : store.review_user_)
        if (u >= n_users) throw Error("store: review user id out of range");

    store.rebuild_user_index();
    return store;
}

} // namespace coclique
