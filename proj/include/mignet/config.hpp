#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mignet/assortativity.hpp"
#include "mignet/attachment.hpp"
#include "mignet/centrality.hpp"
#include "mignet/corpus.hpp"
#include "mignet/error.hpp"
#include "mignet/io.hpp"
#include "mignet/labeling.hpp"
#include "mignet/paths.hpp"
#include "mignet/synth.hpp"

namespace mignet {

/// Every knob of a pipeline run. Empty input paths resolve to files of the
/// same name inside `out_dir`.
struct PipelineConfig {
  std::string out_dir = "mignet_out";
  std::string users;
  std::string tweets;
  std::string edges;
  std::string labels;

  LabelingConfig labeling;
  HashtagTableConfig hashtags;
  std::size_t attachment_bins = 20;
  std::size_t top_hashtags = 20;
  std::size_t flows_min_count = 10;

  std::size_t recent_tweets = kDefaultRecentTweets;
  DateRange feature_range;

  std::string graph_scope = "giant";  // giant | full
  std::size_t histogram_bins = 30;
  std::size_t top_k = 10;
  CentralityOptions centrality;
  PathLengthOptions paths;

  std::vector<double> alpha_grid = default_alpha_grid();

  SynthConfig synth;
  unsigned threads = 0;  // 0: all hardware threads

  fs::path input_path(const std::string& explicit_path, const char* name) const {
    return explicit_path.empty() ? fs::path(out_dir) / name : fs::path(explicit_path);
  }
  fs::path users_path() const { return input_path(users, "users.jsonl"); }
  fs::path tweets_path() const { return input_path(tweets, "tweets.jsonl"); }
  fs::path edges_path() const { return input_path(edges, "edges.jsonl"); }
  fs::path labels_path() const { return input_path(labels, "labels.jsonl"); }

  void validate() const {
    labeling.validate();
    if (hashtags.entropy_threshold < 0.0 || hashtags.entropy_threshold > 1.0)
      throw ValidationError("hashtags.entropy_threshold must lie in [0, 1]");
    if (attachment_bins < 1 || histogram_bins < 1) throw ValidationError("histogram bin counts must be >= 1");
    if (recent_tweets < 1) throw ValidationError("features.recent_tweets must be >= 1");
    if (top_hashtags < 1 || top_k < 1) throw ValidationError("top-k sizes must be >= 1");
    if (graph_scope != "giant" && graph_scope != "full")
      throw ValidationError("graph.scope must be 'giant' or 'full'");
    if (!(centrality.pagerank_damping > 0.0 && centrality.pagerank_damping < 1.0))
      throw ValidationError("centrality.pagerank_damping must lie in (0, 1)");
    if (centrality.betweenness_samples < 1 || paths.sources < 1)
      throw ValidationError("sample counts must be >= 1");
    detail::check_alpha_grid(alpha_grid);
  }
};

/// One settable configuration key.
struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
  bool echoed = true;  // paths and thread caps do not change results and stay out of artifact metadata
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ValidationError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "' as " +
                        std::string(expected));
}

template <typename T>
T parse_integer(std::string_view key, std::string_view v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

inline double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "a real number");
  return out;
}

inline std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    auto comma = v.find(',', start);
    auto item = trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
ConfigKey integer_key(std::string name, std::string help, T PipelineConfig::*field) {
  return {name, std::move(help),
          [name, field](PipelineConfig& c, std::string_view v) { c.*field = parse_integer<T>(name, v); },
          [field](const PipelineConfig& c) { return std::to_string(c.*field); }};
}

template <typename S, typename T>
ConfigKey nested_integer_key(std::string name, std::string help, S PipelineConfig::*outer, T S::*field) {
  return {name, std::move(help),
          [name, outer, field](PipelineConfig& c, std::string_view v) {
            c.*outer.*field = parse_integer<T>(name, v);
          },
          [outer, field](const PipelineConfig& c) { return std::to_string(c.*outer.*field); }};
}

template <typename S>
ConfigKey nested_real_key(std::string name, std::string help, S PipelineConfig::*outer, double S::*field) {
  return {name, std::move(help),
          [name, outer, field](PipelineConfig& c, std::string_view v) { c.*outer.*field = parse_real(name, v); },
          [outer, field](const PipelineConfig& c) { return format_double(c.*outer.*field); }};
}

inline ConfigKey path_key(std::string name, std::string help, std::string PipelineConfig::*field) {
  ConfigKey k{name, std::move(help), [field](PipelineConfig& c, std::string_view v) { c.*field = trim(v); },
              [field](const PipelineConfig& c) { return c.*field; }};
  k.echoed = false;
  return k;
}

inline ConfigKey date_key(std::string name, std::string help, std::optional<Date> DateRange::*field) {
  return {name, std::move(help),
          [name, field](PipelineConfig& c, std::string_view v) {
            if (v.empty()) {
              c.feature_range.*field = std::nullopt;
              return;
            }
            auto d = parse_date(v);
            if (!d) bad_value(name, v, "a YYYY-MM-DD date");
            c.feature_range.*field = *d;
          },
          [field](const PipelineConfig& c) {
            const auto& d = c.feature_range.*field;
            return d ? format_date(*d) : std::string();
          }};
}

}  // namespace detail

/// The full key registry in documentation order.
inline const std::vector<ConfigKey>& config_keys() {
  using namespace detail;
  using C = PipelineConfig;
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    k.push_back(path_key("out", "output directory; also the default location of every input", &C::out_dir));
    k.push_back(path_key("users", "profiles file (default <out>/users.jsonl)", &C::users));
    k.push_back(path_key("tweets", "tweets file (default <out>/tweets.jsonl)", &C::tweets));
    k.push_back(path_key("edges", "follow edges, .jsonl or .csv (default <out>/edges.jsonl)", &C::edges));
    k.push_back(path_key("labels", "labels file (default <out>/labels.jsonl)", &C::labels));

    k.push_back(nested_integer_key("label.year", "reference year for residence", &C::labeling, &LabelingConfig::year));
    k.push_back(nested_integer_key("label.min_residence_days", "distinct geo-tagged days needed for a residence",
                                   &C::labeling, &LabelingConfig::min_residence_days));
    k.push_back(nested_real_key("label.beta", "weight of own locations against friends' residences",
                                &C::labeling, &LabelingConfig::beta));
    k.push_back(nested_integer_key("label.min_nationality_evidence",
                                   "geo-tagged tweets plus labeled friends needed for a nationality", &C::labeling,
                                   &LabelingConfig::min_nationality_evidence));
    k.push_back(nested_real_key("hashtags.entropy_threshold", "hashtags with higher normalized entropy stay unlabeled",
                                &C::hashtags, &HashtagTableConfig::entropy_threshold));
    k.push_back(nested_integer_key("hashtags.min_support", "distinct natives needed to label a hashtag",
                                   &C::hashtags, &HashtagTableConfig::min_support));
    k.push_back(integer_key("attachment.bins", "bins of the HA/DA histograms", &C::attachment_bins));
    k.push_back(integer_key("report.top_hashtags", "hashtags listed per group", &C::top_hashtags));
    k.push_back(integer_key("report.flows_min_count", "smallest migrant flow kept in flows.csv", &C::flows_min_count));

    k.push_back(integer_key("features.recent_tweets", "recent-tweet window for location/language counts",
                            &C::recent_tweets));
    k.push_back(date_key("features.from", "first day (inclusive) considered by the recent-tweet window",
                         &DateRange::from));
    k.push_back(date_key("features.to", "last day (inclusive) considered by the recent-tweet window", &DateRange::to));

    k.push_back({"graph.scope", "node set for graph and assortativity stages: giant | full",
                 [](C& c, std::string_view v) { c.graph_scope = trim(v); },
                 [](const C& c) { return c.graph_scope; }});
    k.push_back(integer_key("graph.histogram_bins", "log bins of the degree histograms", &C::histogram_bins));
    k.push_back(integer_key("graph.top_k", "top users listed per centrality measure", &C::top_k));
    k.push_back({"centrality.closeness_direction", "in: distances into the node; out: distances from it",
                 [](C& c, std::string_view v) {
                   auto t = trim(v);
                   if (t == "in")
                     c.centrality.closeness_direction = Direction::In;
                   else if (t == "out")
                     c.centrality.closeness_direction = Direction::Out;
                   else
                     bad_value("centrality.closeness_direction", v, "'in' or 'out'");
                 },
                 [](const C& c) { return std::string(c.centrality.closeness_direction == Direction::In ? "in" : "out"); }});
    k.push_back(nested_integer_key("centrality.betweenness_exact_threshold",
                                   "largest node count with exact betweenness", &C::centrality,
                                   &CentralityOptions::betweenness_exact_threshold));
    k.push_back(nested_integer_key("centrality.betweenness_samples", "sampled sources above the threshold",
                                   &C::centrality, &CentralityOptions::betweenness_samples));
    k.push_back(nested_integer_key("centrality.betweenness_seed", "seed of the betweenness source sample",
                                   &C::centrality, &CentralityOptions::betweenness_seed));
    k.push_back(nested_real_key("centrality.pagerank_damping", "PageRank damping factor", &C::centrality,
                                &CentralityOptions::pagerank_damping));
    k.push_back(nested_real_key("centrality.pagerank_tolerance", "PageRank L1 stopping tolerance", &C::centrality,
                                &CentralityOptions::pagerank_tolerance));
    k.push_back(nested_integer_key("centrality.pagerank_max_iter", "PageRank iteration cap", &C::centrality,
                                   &CentralityOptions::pagerank_max_iter));
    k.push_back(nested_real_key("centrality.eigenvector_tolerance", "eigenvector L2 stopping tolerance",
                                &C::centrality, &CentralityOptions::eigenvector_tolerance));
    k.push_back(nested_integer_key("centrality.eigenvector_max_iter", "eigenvector iteration cap", &C::centrality,
                                   &CentralityOptions::eigenvector_max_iter));
    k.push_back(nested_integer_key("paths.exact_threshold", "largest node count with all-source path lengths",
                                   &C::paths, &PathLengthOptions::exact_threshold));
    k.push_back(nested_integer_key("paths.sources", "sampled BFS sources above the threshold", &C::paths,
                                   &PathLengthOptions::sources));
    k.push_back(nested_integer_key("paths.seed", "seed of the path-length source sample", &C::paths,
                                   &PathLengthOptions::seed));
    k.push_back({"assort.alpha_grid", "comma-separated restart parameters in [0, 1) for local assortativity",
                 [](C& c, std::string_view v) {
                   std::vector<double> grid;
                   for (const auto& item : split_list(v)) grid.push_back(parse_real("assort.alpha_grid", item));
                   c.alpha_grid = std::move(grid);
                 },
                 [](const C& c) {
                   std::string s;
                   for (double a : c.alpha_grid) s += (s.empty() ? "" : ",") + format_double(a);
                   return s;
                 }});

    k.push_back(nested_integer_key("synth.n_users", "synthetic users", &C::synth, &SynthConfig::n_users));
    k.push_back(nested_real_key("synth.migrant_fraction", "share of synthetic migrants", &C::synth,
                                &SynthConfig::migrant_fraction));
    k.push_back({"synth.countries", "comma-separated ISO codes of synthetic countries",
                 [](C& c, std::string_view v) {
                   std::vector<CountryCode> out;
                   for (const auto& item : split_list(v)) {
                     auto code = CountryCode::parse(item);
                     if (!code) bad_value("synth.countries", item, "an ISO 3166-1 alpha-2 code");
                     out.push_back(*code);
                   }
                   c.synth.countries = std::move(out);
                 },
                 [](const C& c) {
                   std::string s;
                   for (auto code : c.synth.countries) s += (s.empty() ? "" : ",") + code.str();
                   return s;
                 }});
    k.push_back(nested_real_key("synth.p_in", "edge probability within a nationality group", &C::synth,
                                &SynthConfig::p_in));
    k.push_back(nested_real_key("synth.p_out", "edge probability across nationality groups", &C::synth,
                                &SynthConfig::p_out));
    k.push_back(nested_integer_key("synth.tweets_per_user", "geo-tagged tweets per user in the reference year",
                                   &C::synth, &SynthConfig::tweets_per_user));
    k.push_back(nested_integer_key("synth.active_days", "distinct days in the residence country", &C::synth,
                                   &SynthConfig::active_days));
    k.push_back(nested_integer_key("synth.home_visit_days", "migrant days in the nationality country", &C::synth,
                                   &SynthConfig::home_visit_days));
    k.push_back(nested_integer_key("synth.travel_days", "native days abroad", &C::synth, &SynthConfig::travel_days));
    k.push_back(nested_integer_key("synth.history_tweets", "earlier-year tweets from the nationality country",
                                   &C::synth, &SynthConfig::history_tweets));
    k.push_back(nested_real_key("synth.untagged_fraction", "extra tweets without location, relative to tweets_per_user",
                                &C::synth, &SynthConfig::untagged_fraction));
    k.push_back(nested_integer_key("synth.hashtag_vocabulary", "country-specific hashtags per country", &C::synth,
                                   &SynthConfig::hashtag_vocabulary));
    k.push_back(nested_integer_key("synth.shared_hashtags", "hashtags shared by all countries", &C::synth,
                                   &SynthConfig::shared_hashtags));
    k.push_back(nested_integer_key("synth.year", "reference year of synthetic tweets", &C::synth, &SynthConfig::year));
    k.push_back(nested_integer_key("synth.seed", "synthetic generator seed", &C::synth, &SynthConfig::seed));
    k.push_back(integer_key("threads", "worker thread cap (0: all hardware threads)", &C::threads));
    k.back().echoed = false;
    return k;
  }();
  return keys;
}

inline const ConfigKey& find_key(std::string_view name) {
  for (const auto& k : config_keys())
    if (k.name == name) return k;
  throw ValidationError("unknown config key '" + std::string(name) + "'");
}

inline void set_key(PipelineConfig& cfg, std::string_view name, std::string_view value) {
  find_key(name).set(cfg, detail::trim(value));
}

/// Applies "key = value" text: one assignment per line, '#' starts a comment,
/// blank lines are ignored.
inline void apply_config_text(PipelineConfig& cfg, std::string_view text, const std::string& origin) {
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto body = detail::trim(line);
    if (!body.empty()) {
      auto eq = body.find('=');
      if (eq == std::string::npos)
        throw ValidationError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
      set_key(cfg, detail::trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
}

inline void apply_config_file(PipelineConfig& cfg, const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw MissingInputError("config file '" + path + "' does not exist");
  apply_config_text(cfg, read_file(path), path);
}

/// Environment name of a key: MIGNET_ + upper case, '.' replaced by '_'.
inline std::string env_name(std::string_view key) {
  std::string out = "MIGNET_";
  for (char c : key) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

inline void apply_environment(PipelineConfig& cfg) {
  for (const auto& k : config_keys())
    if (const char* v = std::getenv(env_name(k.name).c_str()); v != nullptr) k.set(cfg, v);
}

/// Result-affecting keys with their current values, in registry order.
inline nlohmann::ordered_json config_echo(const PipelineConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& k : config_keys())
    if (k.echoed) j[k.name] = k.get(cfg);
  return j;
}

}  // namespace mignet
