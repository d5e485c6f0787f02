#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mignet/corpus.hpp"
#include "mignet/labeling.hpp"
#include "mignet/stats.hpp"

namespace mignet {

/// hashtag -> country -> number of distinct native users of that country
/// who used the hashtag.
using NativeUsage = std::map<std::string, std::map<CountryCode, std::size_t>, std::less<>>;

inline NativeUsage native_usages(std::span<const UserLabel> labels, const Corpus& corpus) {
  NativeUsage out;
  for (const auto& l : labels) {
    if (l.status != Status::Native) continue;
    std::set<std::uint32_t> seen;
    for (const auto& t : corpus.tweets.tweets_of(l.user_id))
      for (auto id : corpus.tweets.tags(t)) seen.insert(id);
    for (auto id : seen) ++out[corpus.tweets.hashtag(id)][*l.residence];
  }
  return out;
}

struct HashtagEntry {
  OptCountry country;
  double entropy = 0.0;     // normalized to [0, 1]
  std::size_t support = 0;  // distinct native users
};

struct HashtagTableConfig {
  double entropy_threshold = 0.5;
  std::size_t min_support = 5;
};

struct HashtagCountryTable {
  std::map<std::string, HashtagEntry, std::less<>> entries;
  HashtagTableConfig config;

  OptCountry country_of(std::string_view tag) const {
    auto it = entries.find(tag);
    return it == entries.end() ? std::nullopt : it->second.country;
  }
};

/// Shannon entropy of a count distribution divided by ln(m), m = number of
/// non-zero categories; 0 when m <= 1.
inline double normalized_entropy(const std::map<CountryCode, std::size_t>& counts) {
  std::size_t total = 0, m = 0;
  for (const auto& [c, n] : counts) {
    total += n;
    m += n > 0 ? 1 : 0;
  }
  if (m <= 1) return 0.0;
  double h = 0.0;
  for (const auto& [c, n] : counts) {
    if (n == 0) continue;
    double p = static_cast<double>(n) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return std::clamp(h / std::log(static_cast<double>(m)), 0.0, 1.0);
}

/// Labels each hashtag with the most frequent residence country of the
/// natives using it, unless the distribution is too spread out (entropy above
/// the threshold) or too few natives use it.
inline HashtagCountryTable build_hashtag_table(const NativeUsage& usage, const HashtagTableConfig& config = {}) {
  if (config.entropy_threshold < 0.0 || config.entropy_threshold > 1.0)
    throw ValidationError("entropy threshold must lie in [0, 1]");
  HashtagCountryTable table;
  table.config = config;
  for (const auto& [tag, counts] : usage) {
    HashtagEntry e;
    for (const auto& [c, n] : counts) e.support += n;
    e.entropy = normalized_entropy(counts);
    if (e.support >= config.min_support && e.entropy <= config.entropy_threshold) {
      const std::pair<const CountryCode, std::size_t>* best = nullptr;
      for (const auto& entry : counts)
        if (best == nullptr || entry.second > best->second) best = &entry;
      e.country = best->first;
    }
    table.entries.emplace(tag, e);
  }
  return table;
}

struct AttachmentScore {
  std::string user_id;
  Status status = Status::Unknown;
  std::optional<double> ha;  // home attachment
  std::optional<double> da;  // destination attachment
  std::size_t labeled_occurrences = 0;
};

/// Home/destination attachment of one labeled user: the shares of the user's
/// country-labeled hashtag occurrences attributed to the nationality and the
/// residence country respectively.
inline AttachmentScore attachment_scores(const UserLabel& label, const HashtagCounts& usage,
                                         const HashtagCountryTable& table) {
  if (label.status == Status::Unknown)
    throw ValidationError("user '" + label.user_id + "' has no residence/nationality label");
  AttachmentScore s;
  s.user_id = label.user_id;
  s.status = label.status;
  std::size_t home = 0, dest = 0;
  for (const auto& [tag, n] : usage) {
    auto c = table.country_of(tag);
    if (!c) continue;
    s.labeled_occurrences += n;
    if (*c == *label.nationality) home += n;
    if (*c == *label.residence) dest += n;
  }
  if (s.labeled_occurrences > 0) {
    s.ha = static_cast<double>(home) / static_cast<double>(s.labeled_occurrences);
    s.da = static_cast<double>(dest) / static_cast<double>(s.labeled_occurrences);
  }
  return s;
}

struct AttachmentBatch {
  std::vector<AttachmentScore> scores;  // user_id order
  std::size_t skipped_unknown = 0;
};

inline AttachmentBatch score_users(std::span<const UserLabel> labels, const Corpus& corpus,
                                   const HashtagCountryTable& table) {
  AttachmentBatch out;
  std::vector<const UserLabel*> labeled;
  for (const auto& l : labels) {
    if (l.status == Status::Unknown)
      ++out.skipped_unknown;
    else
      labeled.push_back(&l);
  }
  out.scores.resize(labeled.size());
  parallel_for(labeled.size(), [&](std::size_t i) {
    out.scores[i] = attachment_scores(*labeled[i], hashtag_usage(labeled[i]->user_id, corpus), table);
  });
  return out;
}

struct AttachmentHistograms {
  Status group = Status::Native;
  std::size_t count = 0;  // users with defined scores
  Histogram ha;
  Histogram da;
  std::optional<double> mean_ha;
  std::optional<double> mean_da;
};

/// HA/DA histograms over [0, 1] for one group; users with undefined scores
/// are left out.
inline AttachmentHistograms attachment_histograms(std::span<const AttachmentScore> scores, Status group,
                                                  std::size_t bins) {
  std::vector<double> ha, da;
  for (const auto& s : scores) {
    if (s.status != group || !s.ha) continue;
    ha.push_back(*s.ha);
    da.push_back(*s.da);
  }
  AttachmentHistograms out;
  out.group = group;
  out.count = ha.size();
  out.ha = histogram(ha, bins, false, std::make_pair(0.0, 1.0));
  out.da = histogram(da, bins, false, std::make_pair(0.0, 1.0));
  out.mean_ha = summarize(ha).mean;
  out.mean_da = summarize(da).mean;
  return out;
}

/// Hashtag occurrence counts pooled over every user with the given status.
inline HashtagCounts group_hashtag_counts(std::span<const UserLabel> labels, const Corpus& corpus, Status group) {
  HashtagCounts out;
  for (const auto& l : labels) {
    if (l.status != group) continue;
    for (const auto& t : corpus.tweets.tweets_of(l.user_id))
      for (auto id : corpus.tweets.tags(t)) ++out[corpus.tweets.hashtag(id)];
  }
  return out;
}

/// The k most used hashtags, counts divided by the largest count. Ties are
/// listed in lexicographic order.
inline std::vector<std::pair<std::string, double>> top_hashtags(const HashtagCounts& counts, std::size_t k) {
  if (k < 1) throw ValidationError("top_hashtags needs k >= 1");
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<std::pair<std::string, double>> out;
  if (ranked.empty()) return out;
  const double top = static_cast<double>(ranked.front().second);
  for (auto& [tag, n] : ranked) out.emplace_back(std::move(tag), top > 0 ? static_cast<double>(n) / top : 0.0);
  return out;
}

}  // namespace mignet
