#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mignet/corpus.hpp"
#include "mignet/country.hpp"
#include "mignet/error.hpp"
#include "mignet/parallel.hpp"

namespace mignet {

enum class Status { Migrant, Native, Unknown };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Migrant: return "migrant";
    case Status::Native: return "native";
    case Status::Unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<Status> parse_status(std::string_view s) {
  if (s == "migrant") return Status::Migrant;
  if (s == "native") return Status::Native;
  if (s == "unknown") return Status::Unknown;
  return std::nullopt;
}

struct LabelingConfig {
  int year = 2018;
  int min_residence_days = 10;
  double beta = 0.5;  // weight of the user's own locations vs. friends' residences
  int min_nationality_evidence = 5;

  void validate() const {
    if (min_residence_days < 1) throw ValidationError("min_residence_days must be >= 1");
    if (min_nationality_evidence < 1) throw ValidationError("min_nationality_evidence must be >= 1");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("beta must lie in [0, 1]");
  }
};

struct CountryActivity {
  std::size_t days = 0;
  std::size_t tweets = 0;
};

struct ResidenceEvidence {
  std::map<CountryCode, CountryActivity> activity;  // within the labeling year
  std::size_t geo_days = 0;                          // distinct days with any geo-tagged tweet
};

struct ResidenceResult {
  OptCountry country;
  ResidenceEvidence evidence;
};

struct NationalityEvidence {
  std::size_t geo_tweets = 0;
  std::size_t labeled_friends = 0;
  std::map<CountryCode, double> user_share;
  std::map<CountryCode, double> friend_share;
  std::map<CountryCode, double> score;
};

struct NationalityResult {
  OptCountry country;
  NationalityEvidence evidence;
};

/// Country with the most distinct active days in `config.year`.
///
/// `tweets` is any range of records exposing `timestamp` and `country`. Ties on
/// day counts go to the country with more geo-tagged tweets, then to the
/// lexicographically smaller code. Yields no country when the user has fewer
/// than `min_residence_days` distinct geo-tagged days.
template <typename TweetRange>
ResidenceResult infer_residence(const TweetRange& tweets, const LabelingConfig& config) {
  ResidenceResult out;
  std::set<std::pair<CountryCode, Date>> country_days;
  std::set<Date> days;
  for (const auto& t : tweets) {
    if (!t.country || year_of(t.timestamp) != config.year) continue;
    Date d = day_of(t.timestamp);
    ++out.evidence.activity[*t.country].tweets;
    if (country_days.emplace(*t.country, d).second) ++out.evidence.activity[*t.country].days;
    days.insert(d);
  }
  out.evidence.geo_days = days.size();
  if (out.evidence.geo_days < static_cast<std::size_t>(config.min_residence_days)) return out;
  const std::pair<const CountryCode, CountryActivity>* best = nullptr;
  for (const auto& entry : out.evidence.activity) {
    if (best == nullptr || entry.second.days > best->second.days ||
        (entry.second.days == best->second.days && entry.second.tweets > best->second.tweets))
      best = &entry;  // map order makes the lexicographic tie-break implicit
  }
  if (best != nullptr) out.country = best->first;
  return out;
}

/// Nationality as the argmax of
///   beta * (share of the user's geo-tagged tweets in c, full history)
///   + (1 - beta) * (share of labeled friends resident in c).
/// `friend_residences` lists the residences of friends that have one.
template <typename TweetRange>
NationalityResult infer_nationality(const TweetRange& tweets, std::span<const CountryCode> friend_residences,
                                    const LabelingConfig& config) {
  NationalityResult out;
  auto& ev = out.evidence;
  std::map<CountryCode, std::size_t> tweet_counts;
  for (const auto& t : tweets) {
    if (!t.country) continue;
    ++tweet_counts[*t.country];
    ++ev.geo_tweets;
  }
  std::map<CountryCode, std::size_t> friend_counts;
  for (const auto& c : friend_residences) ++friend_counts[c];
  ev.labeled_friends = friend_residences.size();

  for (const auto& [c, n] : tweet_counts) ev.user_share[c] = static_cast<double>(n) / ev.geo_tweets;
  for (const auto& [c, n] : friend_counts) ev.friend_share[c] = static_cast<double>(n) / ev.labeled_friends;
  for (const auto& [c, s] : ev.user_share) ev.score[c] += config.beta * s;
  for (const auto& [c, s] : ev.friend_share) ev.score[c] += (1.0 - config.beta) * s;

  if (ev.geo_tweets + ev.labeled_friends < static_cast<std::size_t>(config.min_nationality_evidence)) return out;
  const std::pair<const CountryCode, double>* best = nullptr;
  for (const auto& entry : ev.score)
    if (best == nullptr || entry.second > best->second) best = &entry;
  if (best != nullptr) out.country = best->first;
  return out;
}

inline Status classify(const OptCountry& nationality, const OptCountry& residence) {
  if (!nationality || !residence) return Status::Unknown;
  return *nationality == *residence ? Status::Native : Status::Migrant;
}

struct UserLabel {
  std::string user_id;
  OptCountry residence;
  OptCountry nationality;
  Status status = Status::Unknown;
  ResidenceEvidence residence_evidence;
  NationalityEvidence nationality_evidence;
};

inline Status classify(const UserLabel& label) { return classify(label.nationality, label.residence); }

/// Labels every known user (profiles and tweet authors), in user_id order.
///
/// Residences are inferred for everyone first; nationalities then use the
/// residences of each user's friends from that first pass.
inline std::vector<UserLabel> label_users(const Corpus& corpus, const LabelingConfig& config) {
  config.validate();
  std::vector<std::string> ids;
  for (const auto& [id, profile] : corpus.users) ids.push_back(id);
  auto authors = corpus.tweets.authors();
  std::vector<std::string> all;
  std::set_union(ids.begin(), ids.end(), authors.begin(), authors.end(), std::back_inserter(all));

  std::vector<UserLabel> labels(all.size());
  parallel_for(all.size(), [&](std::size_t i) {
    labels[i].user_id = all[i];
    auto r = infer_residence(corpus.tweets.tweets_of(all[i]), config);
    labels[i].residence = r.country;
    labels[i].residence_evidence = std::move(r.evidence);
  });

  auto residence_of = [&](const std::string& id) -> OptCountry {
    auto it = std::lower_bound(labels.begin(), labels.end(), id,
                               [](const UserLabel& l, const std::string& key) { return l.user_id < key; });
    if (it == labels.end() || it->user_id != id) return std::nullopt;
    return it->residence;
  };

  parallel_for(all.size(), [&](std::size_t i) {
    std::vector<CountryCode> friend_res;
    for (const auto& f : corpus.edges.friends_of(all[i]))
      if (auto c = residence_of(f)) friend_res.push_back(*c);
    auto n = infer_nationality(corpus.tweets.tweets_of(all[i]), friend_res, config);
    labels[i].nationality = n.country;
    labels[i].nationality_evidence = std::move(n.evidence);
    labels[i].status = classify(labels[i]);
  });
  return labels;
}

// ---- labels.jsonl ----

inline std::string to_jsonl(const UserLabel& l) {
  nlohmann::ordered_json j;
  j["user_id"] = l.user_id;
  j["residence"] = l.residence ? nlohmann::ordered_json(l.residence->str()) : nlohmann::ordered_json(nullptr);
  j["nationality"] =
      l.nationality ? nlohmann::ordered_json(l.nationality->str()) : nlohmann::ordered_json(nullptr);
  j["status"] = to_string(l.status);
  nlohmann::ordered_json ev;
  nlohmann::ordered_json days = nlohmann::ordered_json::object();
  for (const auto& [c, a] : l.residence_evidence.activity) days[c.str()] = {a.days, a.tweets};
  ev["residence_days_tweets"] = days;
  ev["geo_days"] = l.residence_evidence.geo_days;
  ev["geo_tweets"] = l.nationality_evidence.geo_tweets;
  ev["labeled_friends"] = l.nationality_evidence.labeled_friends;
  nlohmann::ordered_json score = nlohmann::ordered_json::object();
  for (const auto& [c, s] : l.nationality_evidence.score) {
    auto us = l.nationality_evidence.user_share.find(c);
    auto fs = l.nationality_evidence.friend_share.find(c);
    score[c.str()] = {us == l.nationality_evidence.user_share.end() ? 0.0 : us->second,
                      fs == l.nationality_evidence.friend_share.end() ? 0.0 : fs->second, s};
  }
  ev["nationality_user_friend_score"] = score;
  j["evidence"] = ev;
  return j.dump();
}

/// Reads labels.jsonl. Evidence is not restored; only ids, countries and status.
inline std::vector<UserLabel> read_labels(const std::string& path) {
  std::vector<UserLabel> out;
  for_each_line(path, [&](std::string_view line, std::size_t no) {
    if (line.empty()) return;
    auto j = nlohmann::json::parse(line, nullptr, false);
    auto bad = [&] { throw ValidationError(path + ": line " + std::to_string(no) + ": malformed label record"); };
    if (j.is_discarded() || !j.is_object() || !j.contains("user_id") || !j["user_id"].is_string()) bad();
    UserLabel l;
    l.user_id = j["user_id"].get<std::string>();
    auto country = [&](const char* key) -> OptCountry {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) return std::nullopt;
      if (!it->is_string()) bad();
      auto c = CountryCode::parse(it->get<std::string>());
      if (!c) bad();
      return c;
    };
    l.residence = country("residence");
    l.nationality = country("nationality");
    l.status = classify(l);
    if (auto it = j.find("status"); it != j.end()) {
      auto s = it->is_string() ? parse_status(it->get<std::string>()) : std::nullopt;
      if (!s || *s != l.status) bad();
    }
    out.push_back(std::move(l));
  });
  std::sort(out.begin(), out.end(), [](const UserLabel& a, const UserLabel& b) { return a.user_id < b.user_id; });
  return out;
}

// ---- migration flows ----

/// Migrant counts per (nationality, residence) pair.
struct FlowMatrix {
  std::vector<CountryCode> nationalities;  // rows
  std::vector<CountryCode> residences;     // columns
  std::map<std::pair<CountryCode, CountryCode>, std::size_t> cells;

  std::size_t at(CountryCode from, CountryCode to) const {
    auto it = cells.find({from, to});
    return it == cells.end() ? 0 : it->second;
  }
  std::size_t total() const {
    std::size_t s = 0;
    for (const auto& [k, v] : cells) s += v;
    return s;
  }
  bool empty() const { return cells.empty(); }
};

struct MigrationFlows {
  FlowMatrix full;
  FlowMatrix filtered;  // rows/columns holding at least one cell >= min_count
  std::size_t min_count = 0;
};

inline MigrationFlows migration_matrix(std::span<const UserLabel> labels, std::size_t min_count) {
  MigrationFlows out;
  out.min_count = min_count;
  std::set<CountryCode> rows, cols;
  for (const auto& l : labels) {
    if (l.status != Status::Migrant) continue;
    ++out.full.cells[{*l.nationality, *l.residence}];
    rows.insert(*l.nationality);
    cols.insert(*l.residence);
  }
  out.full.nationalities.assign(rows.begin(), rows.end());
  out.full.residences.assign(cols.begin(), cols.end());

  std::set<CountryCode> keep_rows, keep_cols;
  for (const auto& [k, v] : out.full.cells) {
    if (v >= min_count) {
      keep_rows.insert(k.first);
      keep_cols.insert(k.second);
    }
  }
  for (const auto& [k, v] : out.full.cells)
    if (keep_rows.count(k.first) && keep_cols.count(k.second)) out.filtered.cells[k] = v;
  out.filtered.nationalities.assign(keep_rows.begin(), keep_rows.end());
  out.filtered.residences.assign(keep_cols.begin(), keep_cols.end());
  return out;
}

/// Dense CSV: header "nationality,<res1>,<res2>,...", one row per nationality.
inline std::string to_csv(const FlowMatrix& m) {
  std::string out = "nationality";
  for (const auto& c : m.residences) out += "," + c.str();
  out += "\n";
  for (const auto& r : m.nationalities) {
    out += r.str();
    for (const auto& c : m.residences) out += "," + std::to_string(m.at(r, c));
    out += "\n";
  }
  return out;
}

}  // namespace mignet
