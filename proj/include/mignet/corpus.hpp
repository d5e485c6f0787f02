#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mignet/country.hpp"
#include "mignet/error.hpp"
#include "mignet/io.hpp"
#include "mignet/text.hpp"

namespace mignet {

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct UserProfile {
  std::string user_id;
  Date created_at{};
  std::uint64_t followers_count = 0;
  std::uint64_t friends_count = 0;
  std::uint64_t statuses_count = 0;
  bool verified = false;
};

struct Tweet {
  std::string tweet_id;
  std::string user_id;
  Timestamp timestamp = 0;
  OptCountry country;
  std::optional<std::string> language;
  std::vector<std::string> hashtags;  // normalized
};

struct FollowEdge {
  std::string src;
  std::string dst;
  friend auto operator<=>(const FollowEdge&, const FollowEdge&) = default;
};

/// Counters produced by every reader.
struct IngestDiagnostics {
  std::size_t lines = 0;
  std::size_t skipped = 0;     // malformed lines
  std::size_t duplicates = 0;  // records replaced or collapsed by key
  std::size_t self_loops = 0;  // edges only
  std::vector<std::string> examples;  // first few "line N: reason" messages

  void reject(std::size_t line, std::string reason) {
    ++skipped;
    if (examples.size() < 10) examples.push_back("line " + std::to_string(line) + ": " + std::move(reason));
  }
};

// ---------------------------------------------------------------------------
// Record parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::optional<std::uint64_t> json_count(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return std::nullopt;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer()) {
    auto v = it->get<std::int64_t>();
    if (v < 0) return std::nullopt;
    return static_cast<std::uint64_t>(v);
  }
  return std::nullopt;
}

inline std::optional<std::string> json_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace detail

/// Parses one users.jsonl record; nullopt plus a reason on schema violation.
inline std::optional<UserProfile> parse_user(std::string_view line, std::string* reason = nullptr) {
  auto fail = [&](const char* why) -> std::optional<UserProfile> {
    if (reason != nullptr) *reason = why;
    return std::nullopt;
  };
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return fail("not a JSON object");
  UserProfile u;
  auto id = detail::json_string(j, "user_id");
  if (!id || id->empty()) return fail("missing user_id");
  u.user_id = std::move(*id);
  auto created = detail::json_string(j, "created_at");
  if (!created) return fail("missing created_at");
  auto date = parse_date(std::string_view(*created).substr(0, 10));
  if (!date) return fail("bad created_at");
  u.created_at = *date;
  auto followers = detail::json_count(j, "followers_count");
  auto friends = detail::json_count(j, "friends_count");
  auto statuses = detail::json_count(j, "statuses_count");
  if (!followers || !friends || !statuses) return fail("missing or negative count");
  u.followers_count = *followers;
  u.friends_count = *friends;
  u.statuses_count = *statuses;
  auto verified = j.find("verified");
  if (verified == j.end() || !verified->is_boolean()) return fail("missing verified");
  u.verified = verified->get<bool>();
  return u;
}

inline std::optional<Tweet> parse_tweet(std::string_view line, std::string* reason = nullptr) {
  auto fail = [&](const char* why) -> std::optional<Tweet> {
    if (reason != nullptr) *reason = why;
    return std::nullopt;
  };
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return fail("not a JSON object");
  Tweet t;
  auto tid = detail::json_string(j, "tweet_id");
  auto uid = detail::json_string(j, "user_id");
  if (!tid || tid->empty()) return fail("missing tweet_id");
  if (!uid || uid->empty()) return fail("missing user_id");
  t.tweet_id = std::move(*tid);
  t.user_id = std::move(*uid);
  auto ts_it = j.find("timestamp");
  if (ts_it == j.end()) return fail("missing timestamp");
  if (ts_it->is_number_integer()) {
    t.timestamp = ts_it->get<std::int64_t>();
  } else if (ts_it->is_string()) {
    auto ts = parse_timestamp(ts_it->get_ref<const std::string&>());
    if (!ts) return fail("bad timestamp");
    t.timestamp = *ts;
  } else {
    return fail("bad timestamp");
  }
  if (auto it = j.find("country"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) return fail("bad country");
    t.country = CountryCode::parse(it->get_ref<const std::string&>());
    if (!t.country) return fail("unrecognized country code");
  }
  if (auto it = j.find("language"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) return fail("bad language");
    auto lang = utf8_lower(it->get_ref<const std::string&>());
    if (!lang) return fail("bad language");
    if (!lang->empty()) t.language = std::move(*lang);
  }
  if (auto it = j.find("hashtags"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) return fail("hashtags must be an array");
    for (const auto& h : *it) {
      if (!h.is_string()) return fail("hashtag must be a string");
      auto tag = normalize_hashtag(h.get_ref<const std::string&>());
      if (!tag) return fail("empty or whitespace hashtag");
      t.hashtags.push_back(std::move(*tag));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Stores
// ---------------------------------------------------------------------------

/// Profiles keyed by user_id, iterated in user_id order. Immutable after
/// ingest.
class UserStore {
 public:
  using Map = std::map<std::string, UserProfile, std::less<>>;

  /// Inserts or replaces. Returns true if an existing record was replaced.
  bool upsert(UserProfile profile) {
    auto [it, inserted] = users_.insert_or_assign(profile.user_id, profile);
    return !inserted;
  }

  const UserProfile* find(std::string_view id) const {
    auto it = users_.find(id);
    return it == users_.end() ? nullptr : &it->second;
  }
  bool contains(std::string_view id) const { return users_.find(id) != users_.end(); }
  std::size_t size() const { return users_.size(); }
  bool empty() const { return users_.empty(); }
  Map::const_iterator begin() const { return users_.begin(); }
  Map::const_iterator end() const { return users_.end(); }

  friend bool operator==(const UserStore& a, const UserStore& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const auto& x, const auto& y) {
      const auto& p = x.second;
      const auto& q = y.second;
      return p.user_id == q.user_id && p.created_at == q.created_at && p.followers_count == q.followers_count &&
             p.friends_count == q.friends_count && p.statuses_count == q.statuses_count && p.verified == q.verified;
    });
  }

 private:
  Map users_;
};

/// Compact tweet as held by a TweetStore. Strings are interned.
struct StoredTweet {
  std::string tweet_id;
  Timestamp timestamp = 0;
  OptCountry country;
  std::uint32_t language = 0;  // 0 = missing, else 1 + index into language table
  std::uint32_t tags_begin = 0;
  std::uint32_t tags_end = 0;
};

/// Tweets grouped per user, each group ordered most-recent first with ties
/// broken by tweet_id. Immutable after construction.
class TweetStore {
 public:
  TweetStore() = default;

  /// Builds a store from records. Duplicate tweet_ids keep the record that
  /// appears last; `duplicates` receives the number of replaced records.
  static TweetStore from_tweets(std::vector<Tweet> tweets, std::size_t* duplicates = nullptr) {
    // Last occurrence wins: stable sort by id, keep the final element of each run.
    std::vector<std::size_t> order(tweets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return tweets[a].tweet_id < tweets[b].tweet_id; });
    std::vector<std::size_t> keep;
    keep.reserve(order.size());
    std::size_t dups = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k + 1 < order.size() && tweets[order[k]].tweet_id == tweets[order[k + 1]].tweet_id) {
        ++dups;
        continue;
      }
      keep.push_back(order[k]);
    }
    if (duplicates != nullptr) *duplicates = dups;

    std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
      const Tweet& x = tweets[a];
      const Tweet& y = tweets[b];
      if (x.user_id != y.user_id) return x.user_id < y.user_id;
      if (x.timestamp != y.timestamp) return x.timestamp > y.timestamp;
      return x.tweet_id < y.tweet_id;
    });

    TweetStore store;
    std::unordered_map<std::string, std::uint32_t> lang_index;
    std::unordered_map<std::string, std::uint32_t> tag_index;
    store.tweets_.reserve(keep.size());
    for (std::size_t idx : keep) {
      Tweet& t = tweets[idx];
      if (store.users_.empty() || store.users_.back().first != t.user_id)
        store.users_.emplace_back(t.user_id, std::make_pair(store.tweets_.size(), store.tweets_.size()));
      StoredTweet s;
      s.tweet_id = std::move(t.tweet_id);
      s.timestamp = t.timestamp;
      s.country = t.country;
      if (t.language) s.language = 1 + intern(*t.language, lang_index, store.languages_);
      s.tags_begin = static_cast<std::uint32_t>(store.tags_.size());
      for (auto& h : t.hashtags) store.tags_.push_back(intern(h, tag_index, store.hashtags_));
      s.tags_end = static_cast<std::uint32_t>(store.tags_.size());
      store.tweets_.push_back(std::move(s));
      store.users_.back().second.second = store.tweets_.size();
    }
    return store;
  }

  std::size_t size() const { return tweets_.size(); }
  bool empty() const { return tweets_.empty(); }

  /// Tweets of one user, most recent first. Empty span for users without tweets.
  std::span<const StoredTweet> tweets_of(std::string_view user_id) const {
    auto it = std::lower_bound(users_.begin(), users_.end(), user_id,
                               [](const auto& entry, std::string_view id) { return entry.first < id; });
    if (it == users_.end() || it->first != user_id) return {};
    return std::span<const StoredTweet>(tweets_).subspan(it->second.first, it->second.second - it->second.first);
  }

  bool has_user(std::string_view user_id) const { return !tweets_of(user_id).empty(); }

  /// Authors with at least one tweet, in user_id order.
  std::vector<std::string> authors() const {
    std::vector<std::string> out;
    out.reserve(users_.size());
    for (const auto& [id, range] : users_) out.push_back(id);
    return out;
  }

  std::span<const std::uint32_t> tags(const StoredTweet& t) const {
    return std::span<const std::uint32_t>(tags_).subspan(t.tags_begin, t.tags_end - t.tags_begin);
  }
  const std::string& hashtag(std::uint32_t id) const { return hashtags_[id]; }
  std::optional<std::string> language(const StoredTweet& t) const {
    if (t.language == 0) return std::nullopt;
    return languages_[t.language - 1];
  }

  friend bool operator==(const TweetStore& a, const TweetStore& b) {
    if (a.users_ != b.users_ || a.tweets_.size() != b.tweets_.size()) return false;
    for (std::size_t i = 0; i < a.tweets_.size(); ++i) {
      const auto& x = a.tweets_[i];
      const auto& y = b.tweets_[i];
      if (x.tweet_id != y.tweet_id || x.timestamp != y.timestamp || x.country != y.country ||
          a.language(x) != b.language(y))
        return false;
      auto tx = a.tags(x);
      auto ty = b.tags(y);
      if (!std::equal(tx.begin(), tx.end(), ty.begin(), ty.end(),
                      [&](std::uint32_t p, std::uint32_t q) { return a.hashtag(p) == b.hashtag(q); }))
        return false;
    }
    return true;
  }

 private:
  static std::uint32_t intern(const std::string& s, std::unordered_map<std::string, std::uint32_t>& index,
                              std::vector<std::string>& table) {
    auto [it, inserted] = index.try_emplace(s, static_cast<std::uint32_t>(table.size()));
    if (inserted) table.push_back(s);
    return it->second;
  }

  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> users_;
  std::vector<StoredTweet> tweets_;
  std::vector<std::uint32_t> tags_;
  std::vector<std::string> hashtags_;
  std::vector<std::string> languages_;
};

/// Deduplicated follow edges without self-loops, sorted by (src, dst).
class EdgeList {
 public:
  EdgeList() = default;

  static EdgeList from_edges(std::vector<FollowEdge> edges, std::size_t* self_loops = nullptr,
                             std::size_t* duplicates = nullptr) {
    std::size_t loops = 0;
    std::erase_if(edges, [&](const FollowEdge& e) {
      bool loop = e.src == e.dst;
      loops += loop ? 1 : 0;
      return loop;
    });
    std::sort(edges.begin(), edges.end());
    auto before = edges.size();
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (self_loops != nullptr) *self_loops = loops;
    if (duplicates != nullptr) *duplicates = before - edges.size();
    EdgeList out;
    out.edges_ = std::move(edges);
    return out;
  }

  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }
  const FollowEdge& operator[](std::size_t i) const { return edges_[i]; }

  /// Out-neighbors ("friends") of a user, sorted.
  std::vector<std::string> friends_of(std::string_view user_id) const {
    auto lo = std::lower_bound(edges_.begin(), edges_.end(), user_id,
                               [](const FollowEdge& e, std::string_view id) { return e.src < id; });
    std::vector<std::string> out;
    for (auto it = lo; it != edges_.end() && it->src == user_id; ++it) out.push_back(it->dst);
    return out;
  }

  friend bool operator==(const EdgeList&, const EdgeList&) = default;

 private:
  std::vector<FollowEdge> edges_;
};

template <typename Store>
struct Ingested {
  Store store;
  IngestDiagnostics diagnostics;
};

// ---------------------------------------------------------------------------
// Readers
// ---------------------------------------------------------------------------

/// Reads users.jsonl (optionally .gz). Malformed lines are skipped and
/// counted; a repeated user_id replaces the earlier record.
inline Ingested<UserStore> ingest_users(const std::string& path) {
  Ingested<UserStore> out;
  for_each_line(path, [&](std::string_view line, std::size_t no) {
    ++out.diagnostics.lines;
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    std::string reason;
    auto user = parse_user(line, &reason);
    if (!user) return out.diagnostics.reject(no, reason);
    if (out.store.upsert(std::move(*user))) ++out.diagnostics.duplicates;
  });
  if (out.store.empty()) throw EmptyInputError("no valid user records in '" + path + "'");
  return out;
}

inline Ingested<TweetStore> ingest_tweets(const std::string& path) {
  Ingested<TweetStore> out;
  std::vector<Tweet> tweets;
  for_each_line(path, [&](std::string_view line, std::size_t no) {
    ++out.diagnostics.lines;
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    std::string reason;
    auto tweet = parse_tweet(line, &reason);
    if (!tweet) return out.diagnostics.reject(no, reason);
    tweets.push_back(std::move(*tweet));
  });
  if (tweets.empty()) throw EmptyInputError("no valid tweet records in '" + path + "'");
  out.store = TweetStore::from_tweets(std::move(tweets), &out.diagnostics.duplicates);
  return out;
}

/// Reads edges.jsonl ({"src","dst"}) or edges.csv (header "src,dst"); either
/// may be gzip-compressed.
inline Ingested<EdgeList> ingest_edges(const std::string& path) {
  Ingested<EdgeList> out;
  std::vector<FollowEdge> edges;
  const bool csv = has_suffix(strip_gz(path), ".csv");
  bool header_seen = false;
  for_each_line(path, [&](std::string_view line, std::size_t no) {
    ++out.diagnostics.lines;
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    if (csv) {
      auto fields = split_csv(line);
      if (!header_seen) {
        header_seen = true;
        if (fields.size() == 2 && fields[0] == "src" && fields[1] == "dst") return;
        throw ValidationError("'" + path + "': expected CSV header \"src,dst\"");
      }
      if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
        return out.diagnostics.reject(no, "expected two non-empty fields");
      edges.push_back({std::move(fields[0]), std::move(fields[1])});
      return;
    }
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return out.diagnostics.reject(no, "not a JSON object");
    auto src = detail::json_string(j, "src");
    auto dst = detail::json_string(j, "dst");
    if (!src || !dst || src->empty() || dst->empty()) return out.diagnostics.reject(no, "missing src/dst");
    edges.push_back({std::move(*src), std::move(*dst)});
  });
  if (edges.empty()) throw EmptyInputError("no valid edge records in '" + path + "'");
  out.store = EdgeList::from_edges(std::move(edges), &out.diagnostics.self_loops, &out.diagnostics.duplicates);
  return out;
}

// ---------------------------------------------------------------------------
// Writers (same schemas the readers accept)
// ---------------------------------------------------------------------------

inline std::string to_jsonl(const UserProfile& u) {
  nlohmann::ordered_json j;
  j["user_id"] = u.user_id;
  j["created_at"] = format_date(u.created_at);
  j["followers_count"] = u.followers_count;
  j["friends_count"] = u.friends_count;
  j["statuses_count"] = u.statuses_count;
  j["verified"] = u.verified;
  return j.dump();
}

inline std::string to_jsonl(const Tweet& t) {
  nlohmann::ordered_json j;
  j["tweet_id"] = t.tweet_id;
  j["user_id"] = t.user_id;
  j["timestamp"] = format_timestamp(t.timestamp);
  j["country"] = t.country ? nlohmann::ordered_json(t.country->str()) : nlohmann::ordered_json(nullptr);
  j["language"] = t.language ? nlohmann::ordered_json(*t.language) : nlohmann::ordered_json(nullptr);
  j["hashtags"] = t.hashtags;
  return j.dump();
}

inline std::string to_jsonl(const FollowEdge& e) {
  nlohmann::ordered_json j;
  j["src"] = e.src;
  j["dst"] = e.dst;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Corpus and per-user features
// ---------------------------------------------------------------------------

struct Corpus {
  UserStore users;
  TweetStore tweets;
  EdgeList edges;

  /// Known users: profiles plus tweet authors.
  bool knows(std::string_view user_id) const { return users.contains(user_id) || tweets.has_user(user_id); }
};

/// Inclusive calendar-day filter applied before the recency window.
struct DateRange {
  std::optional<Date> from;
  std::optional<Date> to;

  bool contains(Timestamp t) const {
    Date d = day_of(t);
    return (!from || d >= *from) && (!to || d <= *to);
  }
};

struct LocationLanguageCounts {
  std::size_t n_countries = 0;
  std::size_t n_languages = 0;
  bool no_friends = false;  // friend_features only

  friend bool operator==(const LocationLanguageCounts&, const LocationLanguageCounts&) = default;
};

inline constexpr std::size_t kDefaultRecentTweets = 200;

namespace detail {

inline void collect_recent(const TweetStore& tweets, std::string_view user_id, std::size_t k,
                           const DateRange& range, std::set<CountryCode>& countries,
                           std::set<std::uint32_t>& languages) {
  std::size_t taken = 0;
  for (const auto& t : tweets.tweets_of(user_id)) {
    if (taken == k) break;
    if (!range.contains(t.timestamp)) continue;
    ++taken;
    if (t.country) countries.insert(*t.country);
    if (t.language != 0) languages.insert(t.language);
  }
}

}  // namespace detail

/// Distinct countries and languages among a user's k most recent tweets.
inline LocationLanguageCounts recent_tweet_features(std::string_view user_id, const Corpus& corpus,
                                                    std::size_t k = kDefaultRecentTweets,
                                                    const DateRange& range = {}) {
  if (k < 1) throw ValidationError("recent tweet window k must be >= 1");
  if (!corpus.knows(user_id)) throw NotFoundError("unknown user '" + std::string(user_id) + "'");
  std::set<CountryCode> countries;
  std::set<std::uint32_t> languages;
  detail::collect_recent(corpus.tweets, user_id, k, range, countries, languages);
  return {countries.size(), languages.size(), false};
}

/// Distinct countries and languages pooled over the k most recent tweets of
/// each friend (out-neighbor). A user without friends yields (0, 0) with
/// `no_friends` set.
inline LocationLanguageCounts friend_features(std::string_view user_id, const Corpus& corpus,
                                              std::size_t k = kDefaultRecentTweets,
                                              const DateRange& range = {}) {
  if (k < 1) throw ValidationError("recent tweet window k must be >= 1");
  if (!corpus.knows(user_id)) throw NotFoundError("unknown user '" + std::string(user_id) + "'");
  auto friends = corpus.edges.friends_of(user_id);
  if (friends.empty()) return {0, 0, true};
  std::set<CountryCode> countries;
  std::set<std::uint32_t> languages;
  for (const auto& f : friends) detail::collect_recent(corpus.tweets, f, k, range, countries, languages);
  return {countries.size(), languages.size(), false};
}

inline constexpr Date kDefaultReferenceDate = Date(std::chrono::year{2018} / 12 / 31);

/// Whole days from account creation to the reference date.
inline std::int64_t account_age_days(const UserProfile& profile, Date reference = kDefaultReferenceDate) {
  if (profile.created_at > reference)
    throw ValidationError("user '" + profile.user_id + "' created after reference date " +
                          format_date(reference));
  return (reference - profile.created_at).count();
}

using HashtagCounts = std::map<std::string, std::size_t, std::less<>>;

/// Every hashtag occurrence across a user's tweets, with multiplicity.
inline HashtagCounts hashtag_usage(std::string_view user_id, const Corpus& corpus) {
  if (!corpus.knows(user_id)) throw NotFoundError("unknown user '" + std::string(user_id) + "'");
  HashtagCounts out;
  for (const auto& t : corpus.tweets.tweets_of(user_id))
    for (auto id : corpus.tweets.tags(t)) ++out[corpus.tweets.hashtag(id)];
  return out;
}

}  // namespace mignet
