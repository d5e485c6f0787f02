#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mignet/corpus.hpp"
#include "mignet/error.hpp"
#include "mignet/io.hpp"
#include "mignet/labeling.hpp"
#include "mignet/rng.hpp"

namespace mignet {

/// Planted-homophily corpus generator settings.
///
/// Users are split evenly into nationality groups (one per country). A
/// `migrant_fraction` of them reside in a different, uniformly chosen
/// country. Follow edges form a directed stochastic block model over the
/// nationality groups: p_in inside a group, p_out across groups.
struct SynthConfig {
  std::size_t n_users = 1000;
  double migrant_fraction = 0.1;
  std::vector<CountryCode> countries = default_countries();
  double p_in = 0.01;
  double p_out = 0.001;
  std::size_t tweets_per_user = 50;   // tweets in the labeling year
  std::size_t active_days = 40;       // distinct days in the residence country
  std::size_t home_visit_days = 5;    // migrants: days back in the nationality country
  std::size_t travel_days = 2;        // natives: days in some other country
  std::size_t history_tweets = 20;    // earlier-year tweets from the nationality country
  double untagged_fraction = 0.15;    // extra tweets without a location
  std::size_t hashtag_vocabulary = 40;  // country-specific hashtags per country
  std::size_t shared_hashtags = 20;     // hashtags used in every country
  int year = 2018;
  std::uint64_t seed = 1;

  static std::vector<CountryCode> default_countries() {
    std::vector<CountryCode> out;
    for (const char* c : {"IT", "DE", "FR", "GB", "ES"}) out.push_back(*CountryCode::parse(c));
    return out;
  }

  void validate() const {
    if (n_users == 0) throw ValidationError("synth: n_users must be positive");
    if (countries.empty()) throw ValidationError("synth: at least one country is required");
    std::set<CountryCode> unique(countries.begin(), countries.end());
    if (unique.size() != countries.size()) throw ValidationError("synth: duplicate countries");
    if (!(migrant_fraction >= 0.0 && migrant_fraction <= 1.0))
      throw ValidationError("synth: migrant_fraction must lie in [0, 1]");
    if (countries.size() < 2 && migrant_fraction > 0.0)
      throw ValidationError("synth: migrants need at least two countries");
    if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0))
      throw ValidationError("synth: edge probabilities must lie in [0, 1]");
    if (active_days == 0 || active_days + home_visit_days + travel_days > 365)
      throw ValidationError("synth: day budget must fit in one year");
    if (tweets_per_user < active_days + std::max(home_visit_days, travel_days))
      throw ValidationError("synth: tweets_per_user must cover every active day");
    if (hashtag_vocabulary == 0) throw ValidationError("synth: hashtag_vocabulary must be positive");
    if (!(untagged_fraction >= 0.0 && untagged_fraction < 1.0))
      throw ValidationError("synth: untagged_fraction must lie in [0, 1)");
  }
};

struct GroundTruth {
  std::string user_id;
  CountryCode residence;
  CountryCode nationality;
  Status status = Status::Native;
};

/// Receives generated records in a fixed order: all users (with their
/// tweets), then all edges.
struct SynthSink {
  virtual ~SynthSink() = default;
  virtual void user(const UserProfile& profile, const GroundTruth& truth) = 0;
  virtual void tweet(const Tweet& tweet) = 0;
  virtual void edge(const FollowEdge& edge) = 0;
};

struct SynthCorpus : SynthSink {
  std::vector<UserProfile> users;
  std::vector<GroundTruth> truth;
  std::vector<Tweet> tweets;
  std::vector<FollowEdge> edges;

  void user(const UserProfile& p, const GroundTruth& t) override {
    users.push_back(p);
    truth.push_back(t);
  }
  void tweet(const Tweet& t) override { tweets.push_back(t); }
  void edge(const FollowEdge& e) override { edges.push_back(e); }

  Corpus to_corpus() const {
    Corpus c;
    for (const auto& u : users) c.users.upsert(u);
    c.tweets = TweetStore::from_tweets(tweets);
    c.edges = EdgeList::from_edges(edges);
    return c;
  }
};

inline std::string language_of(CountryCode c) {
  static const std::vector<std::pair<const char*, const char*>> table = {
      {"AT", "de"}, {"AU", "en"}, {"BE", "fr"}, {"BR", "pt"}, {"CA", "en"}, {"CH", "de"}, {"CN", "zh"},
      {"DE", "de"}, {"DK", "da"}, {"ES", "es"}, {"FR", "fr"}, {"GB", "en"}, {"GR", "el"}, {"IE", "en"},
      {"IN", "hi"}, {"IT", "it"}, {"JP", "ja"}, {"MX", "es"}, {"NL", "nl"}, {"PL", "pl"}, {"PT", "pt"},
      {"RO", "ro"}, {"RU", "ru"}, {"SE", "sv"}, {"TR", "tr"}, {"US", "en"}};
  const std::string code = c.str();
  for (const auto& [k, v] : table)
    if (code == k) return v;
  std::string lower = code;
  for (char& ch : lower) ch = static_cast<char>(ch - 'A' + 'a');
  return lower;
}

namespace detail {

inline std::string padded(const char* prefix, std::uint64_t i, int width) {
  std::string digits = std::to_string(i);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

}  // namespace detail

/// Streams a synthetic corpus into `sink`. Every draw comes from one seeded
/// generator in a fixed order, so equal configs give identical output.
inline void generate(const SynthConfig& cfg, SynthSink& sink) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t n = cfg.n_users;
  const std::size_t n_countries = cfg.countries.size();
  const int width = std::max(6, static_cast<int>(std::to_string(n).size()));

  // Nationalities round-robin for balanced groups; migrants by shuffle.
  std::vector<std::size_t> nationality(n), residence(n);
  for (std::size_t i = 0; i < n; ++i) nationality[i] = i % n_countries;
  const auto n_migrants = static_cast<std::size_t>(std::llround(cfg.migrant_fraction * static_cast<double>(n)));
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(perm);
  std::vector<bool> migrant(n, false);
  for (std::size_t k = 0; k < n_migrants; ++k) migrant[perm[k]] = true;
  for (std::size_t i = 0; i < n; ++i) {
    residence[i] = nationality[i];
    if (migrant[i]) residence[i] = (nationality[i] + 1 + rng.below(n_countries - 1)) % n_countries;
  }

  const Date year_start = Date(std::chrono::year{cfg.year} / 1 / 1);
  const Date year_end = Date(std::chrono::year{cfg.year} / 12 / 31);
  const auto days_in_year = static_cast<std::uint64_t>((year_end - year_start).count() + 1);
  const Date created_lo = Date(std::chrono::year{cfg.year - 10} / 1 / 1);
  const auto created_span = static_cast<std::uint64_t>((year_end - created_lo).count() - 180);

  std::uint64_t tweet_counter = 0;
  auto pick_tag = [&](std::size_t country) -> std::string {
    // Skewed toward low indices so some tags dominate.
    double u = rng.uniform();
    if (cfg.shared_hashtags > 0 && rng.bernoulli(0.2)) {
      auto k = static_cast<std::size_t>(u * u * static_cast<double>(cfg.shared_hashtags));
      return "shared" + std::to_string(k);
    }
    auto k = static_cast<std::size_t>(u * u * static_cast<double>(cfg.hashtag_vocabulary));
    std::string cc = cfg.countries[country].str();
    for (char& ch : cc) ch = static_cast<char>(ch - 'A' + 'a');
    return cc + "tag" + std::to_string(k);
  };
  auto emit_tweet = [&](const std::string& uid, Timestamp ts, std::optional<std::size_t> country,
                        std::size_t speech_country, std::size_t tag_country) {
    Tweet t;
    t.tweet_id = detail::padded("t", ++tweet_counter, 10);
    t.user_id = uid;
    t.timestamp = ts;
    if (country) t.country = cfg.countries[*country];
    t.language = rng.bernoulli(0.1) ? std::string("en") : language_of(cfg.countries[speech_country]);
    const auto n_tags = static_cast<std::size_t>(rng.below(3));
    for (std::size_t h = 0; h < n_tags; ++h) t.hashtags.push_back(pick_tag(tag_country));
    sink.tweet(t);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::string uid = detail::padded("u", i, width);
    UserProfile p;
    p.user_id = uid;
    p.created_at = created_lo + std::chrono::days(static_cast<std::int64_t>(rng.below(created_span)));
    p.followers_count = static_cast<std::uint64_t>(std::exp(5.0 + 1.5 * rng.normal()));
    p.friends_count = static_cast<std::uint64_t>(std::exp(5.5 + 1.0 * rng.normal()));
    p.statuses_count = static_cast<std::uint64_t>(std::exp(7.0 + 1.2 * rng.normal()));
    p.verified = rng.bernoulli(0.02);
    GroundTruth truth{uid, cfg.countries[residence[i]], cfg.countries[nationality[i]],
                      migrant[i] ? Status::Migrant : Status::Native};
    sink.user(p, truth);

    // Distinct days of the year: the first active_days go to the residence
    // country, the rest to home visits (migrants) or travel (natives).
    const std::size_t extra = migrant[i] ? cfg.home_visit_days : cfg.travel_days;
    auto days = rng.sample_without_replacement(static_cast<std::uint32_t>(days_in_year),
                                               static_cast<std::uint32_t>(cfg.active_days + extra));
    std::size_t travel_country = residence[i];
    if (!migrant[i] && n_countries > 1) travel_country = (residence[i] + 1 + rng.below(n_countries - 1)) % n_countries;
    const std::size_t away_country = migrant[i] ? nationality[i] : travel_country;

    auto stamp = [&](std::uint32_t day) {
      Date d = year_start + std::chrono::days(day);
      return static_cast<Timestamp>(d.time_since_epoch().count()) * 86400 +
             static_cast<Timestamp>(rng.below(86400));
    };
    const std::size_t extra_tweets = cfg.tweets_per_user - cfg.active_days - extra;
    for (std::size_t k = 0; k < days.size(); ++k) {
      const bool home = k < cfg.active_days;
      const std::size_t where = home ? residence[i] : away_country;
      const std::size_t speech = migrant[i] && !home ? nationality[i] : residence[i];
      const std::size_t tags = migrant[i] ? (rng.bernoulli(0.4) ? nationality[i] : residence[i]) : residence[i];
      emit_tweet(uid, stamp(days[k]), where, speech, tags);
    }
    for (std::size_t k = 0; k < extra_tweets; ++k) {
      // Extra tweets land on residence-country active days.
      const auto day = days[rng.below(cfg.active_days)];
      const std::size_t tags = migrant[i] ? (rng.bernoulli(0.4) ? nationality[i] : residence[i]) : residence[i];
      emit_tweet(uid, stamp(day), residence[i], residence[i], tags);
    }
    const auto untagged = static_cast<std::size_t>(
        std::llround(cfg.untagged_fraction * static_cast<double>(cfg.tweets_per_user)));
    for (std::size_t k = 0; k < untagged; ++k)
      emit_tweet(uid, stamp(static_cast<std::uint32_t>(rng.below(days_in_year))), std::nullopt, residence[i],
                 migrant[i] ? nationality[i] : residence[i]);
    // Earlier-year history from the nationality country.
    const Date hist_start = Date(std::chrono::year{cfg.year - 3} / 1 / 1);
    const auto hist_span = static_cast<std::uint64_t>((year_start - hist_start).count());
    for (std::size_t k = 0; k < cfg.history_tweets; ++k) {
      Date d = hist_start + std::chrono::days(static_cast<std::int64_t>(rng.below(hist_span)));
      Timestamp ts = static_cast<Timestamp>(d.time_since_epoch().count()) * 86400 +
                     static_cast<Timestamp>(rng.below(86400));
      emit_tweet(uid, ts, nationality[i], nationality[i], nationality[i]);
    }
  }

  // Directed block model over nationality groups with geometric skipping.
  std::vector<std::vector<std::size_t>> members(n_countries);
  for (std::size_t i = 0; i < n; ++i) members[nationality[i]].push_back(i);
  for (std::size_t u = 0; u < n; ++u) {
    const std::string src = detail::padded("u", u, width);
    for (std::size_t b = 0; b < n_countries; ++b) {
      const double p = b == nationality[u] ? cfg.p_in : cfg.p_out;
      if (p <= 0.0) continue;
      const auto& group = members[b];
      std::size_t pos = static_cast<std::size_t>(rng.geometric(p));
      while (pos < group.size()) {
        const std::size_t v = group[pos];
        if (v != u) sink.edge({src, detail::padded("u", v, width)});
        pos += 1 + static_cast<std::size_t>(rng.geometric(p));
      }
    }
  }
}

inline SynthCorpus generate(const SynthConfig& cfg) {
  SynthCorpus out;
  generate(cfg, out);
  return out;
}

inline std::string to_jsonl(const GroundTruth& t) {
  nlohmann::ordered_json j;
  j["user_id"] = t.user_id;
  j["residence"] = t.residence.str();
  j["nationality"] = t.nationality.str();
  j["status"] = to_string(t.status);
  return j.dump();
}

/// Streams generated records straight to users/tweets/edges/ground_truth
/// .jsonl files through temp files renamed on close.
class SynthFileSink : public SynthSink {
 public:
  explicit SynthFileSink(const fs::path& dir) : dir_(dir) {
    fs::create_directories(dir);
    for (auto* s : {&users_, &tweets_, &edges_, &truth_}) s->exceptions(std::ios::badbit | std::ios::failbit);
    users_.open(dir / "users.jsonl.tmp", std::ios::binary | std::ios::trunc);
    tweets_.open(dir / "tweets.jsonl.tmp", std::ios::binary | std::ios::trunc);
    edges_.open(dir / "edges.jsonl.tmp", std::ios::binary | std::ios::trunc);
    truth_.open(dir / "ground_truth.jsonl.tmp", std::ios::binary | std::ios::trunc);
  }

  void user(const UserProfile& p, const GroundTruth& t) override {
    users_ << to_jsonl(p) << '\n';
    truth_ << to_jsonl(t) << '\n';
  }
  void tweet(const Tweet& t) override { tweets_ << to_jsonl(t) << '\n'; }
  void edge(const FollowEdge& e) override { edges_ << to_jsonl(e) << '\n'; }

  /// Flushes and moves every file into place; returns the final paths.
  std::vector<fs::path> commit() {
    std::vector<fs::path> out;
    for (auto [stream, name] : {std::pair{&users_, "users.jsonl"}, std::pair{&tweets_, "tweets.jsonl"},
                                std::pair{&edges_, "edges.jsonl"}, std::pair{&truth_, "ground_truth.jsonl"}}) {
      stream->close();
      fs::rename(dir_ / (std::string(name) + ".tmp"), dir_ / name);
      out.push_back(dir_ / name);
    }
    return out;
  }

 private:
  fs::path dir_;
  std::ofstream users_, tweets_, edges_, truth_;
};

inline std::vector<GroundTruth> read_ground_truth(const std::string& path) {
  std::vector<GroundTruth> out;
  for_each_line(path, [&](std::string_view line, std::size_t no) {
    if (line.empty()) return;
    auto j = nlohmann::json::parse(line, nullptr, false);
    auto bad = [&] { throw ValidationError(path + ": line " + std::to_string(no) + ": malformed ground truth"); };
    if (j.is_discarded() || !j.is_object()) bad();
    GroundTruth t;
    t.user_id = j.value("user_id", "");
    auto r = CountryCode::parse(j.value("residence", ""));
    auto nat = CountryCode::parse(j.value("nationality", ""));
    auto s = parse_status(j.value("status", ""));
    if (t.user_id.empty() || !r || !nat || !s) bad();
    t.residence = *r;
    t.nationality = *nat;
    t.status = *s;
    out.push_back(std::move(t));
  });
  return out;
}

}  // namespace mignet
