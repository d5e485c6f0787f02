#pragma once

#include <chrono>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mignet/assortativity.hpp"
#include "mignet/attachment.hpp"
#include "mignet/centrality.hpp"
#include "mignet/config.hpp"
#include "mignet/corpus.hpp"
#include "mignet/graph.hpp"
#include "mignet/io.hpp"
#include "mignet/labeling.hpp"
#include "mignet/parallel.hpp"
#include "mignet/paths.hpp"
#include "mignet/power_law.hpp"
#include "mignet/stats.hpp"
#include "mignet/synth.hpp"

namespace mignet {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

struct ArtifactRecord {
  std::string name;  // relative to the output directory
  std::string stage;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Per-invocation state: the configuration, lazily loaded inputs shared by
/// stages, and the artifacts written so far.
class PipelineContext {
 public:
  explicit PipelineContext(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    set_max_threads(cfg_.threads);
  }

  const PipelineConfig& config() const { return cfg_; }
  fs::path out_dir() const { return cfg_.out_dir; }
  const std::vector<ArtifactRecord>& artifacts() const { return artifacts_; }
  const std::vector<std::string>& stages() const { return stages_; }

  /// Metadata block carried by every JSON artifact.
  Json metadata(const std::string& stage) const {
    Json m;
    m["schema_version"] = kSchemaVersion;
    m["stage"] = stage;
    m["config"] = config_echo(cfg_);
    return m;
  }

  void begin(const std::string& stage) {
    stages_.push_back(stage);
    started_ = std::chrono::steady_clock::now();
  }

  void log(const std::string& msg) const {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    std::clog << "[mignet] " << (stages_.empty() ? "" : stages_.back()) << ": " << msg << " (" << format_double(
                                                                                                     std::round(s * 100) / 100)
              << " s)\n";
  }

  void write(const std::string& name, const std::string& content) {
    write_atomic(out_dir() / name, content);
    record(name, sha256_hex(content), content.size());
  }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  /// Registers a file that was written by other means.
  void record_file(const std::string& name) {
    const auto p = out_dir() / name;
    record(name, sha256_file(p), fs::file_size(p));
  }

  const Corpus& corpus() {
    if (!corpus_) load_corpus();
    return *corpus_;
  }
  const Json& ingest_summary() {
    corpus();
    return ingest_summary_;
  }

  void set_labels(std::vector<UserLabel> labels) { labels_ = std::move(labels); }
  const std::vector<UserLabel>& labels() {
    if (!labels_) {
      auto path = require_input(cfg_.labels_path(), "labels", "run `mignet label` first or pass --labels");
      labels_ = read_labels(path.string());
    }
    return *labels_;
  }

  /// Input path, falling back to a ".gz" sibling; MissingInputError otherwise.
  static fs::path resolve_input(const fs::path& p, const std::string& what, const std::string& hint) {
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) return p;
    fs::path gz = p;
    gz += ".gz";
    if (fs::is_regular_file(gz, ec)) return gz;
    throw MissingInputError("missing " + what + " input '" + p.string() + "': " + hint);
  }

  /// Inputs read so far, keyed by role, with the resolved path.
  const std::map<std::string, fs::path>& inputs() const { return inputs_; }

 private:
  fs::path require_input(const fs::path& p, const std::string& what, const std::string& hint) {
    auto resolved = resolve_input(p, what, hint);
    inputs_[what] = resolved;
    return resolved;
  }

  void record(const std::string& name, std::string sha, std::uintmax_t bytes) {
    const std::string stage = stages_.empty() ? "" : stages_.back();
    std::erase_if(artifacts_, [&](const ArtifactRecord& r) { return r.name == name; });
    artifacts_.push_back({name, stage, std::move(sha), bytes});
  }

  static Json diagnostics_json(const IngestDiagnostics& d, std::size_t records, const fs::path& path) {
    Json j;
    j["file"] = path.filename().string();
    j["lines"] = d.lines;
    j["records"] = records;
    j["skipped"] = d.skipped;
    j["duplicates"] = d.duplicates;
    j["self_loops"] = d.self_loops;
    Json ex = Json::array();
    for (const auto& e : d.examples) ex.push_back(e);
    j["skipped_examples"] = ex;
    return j;
  }

  void load_corpus() {
    const std::string hint = "run `mignet synth` or pass the path explicitly";
    auto up = require_input(cfg_.users_path(), "users", hint);
    auto tp = require_input(cfg_.tweets_path(), "tweets", hint);
    fs::path ep;
    try {
      ep = require_input(cfg_.edges_path(), "edges", hint);
    } catch (const MissingInputError&) {
      if (!cfg_.edges.empty()) throw;
      ep = require_input(fs::path(cfg_.out_dir) / "edges.csv", "edges", hint);
    }
    Corpus c;
    auto users = ingest_users(up.string());
    auto tweets = ingest_tweets(tp.string());
    auto edges = ingest_edges(ep.string());
    ingest_summary_ = Json::object();
    ingest_summary_["users"] = diagnostics_json(users.diagnostics, users.store.size(), up);
    ingest_summary_["tweets"] = diagnostics_json(tweets.diagnostics, tweets.store.size(), tp);
    ingest_summary_["edges"] = diagnostics_json(edges.diagnostics, edges.store.size(), ep);
    c.users = std::move(users.store);
    c.tweets = std::move(tweets.store);
    c.edges = std::move(edges.store);
    corpus_ = std::move(c);
  }

  PipelineConfig cfg_;
  std::optional<Corpus> corpus_;
  Json ingest_summary_;
  std::optional<std::vector<UserLabel>> labels_;
  std::map<std::string, fs::path> inputs_;
  std::vector<ArtifactRecord> artifacts_;
  std::vector<std::string> stages_;
  std::chrono::steady_clock::time_point started_ = std::chrono::steady_clock::now();
};

namespace detail {

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json summary_json(const Summary& s) {
  Json j;
  j["count"] = s.count;
  j["mean"] = optional_json(s.mean);
  j["min"] = optional_json(s.min);
  j["max"] = optional_json(s.max);
  return j;
}

inline Json histogram_json(const Histogram& h) {
  Json j;
  j["log_x"] = h.log_x;
  j["edges"] = h.edges;
  j["counts"] = h.counts;
  return j;
}

inline Json flows_json(const FlowMatrix& m) {
  Json j;
  Json rows = Json::array(), cols = Json::array();
  for (auto c : m.nationalities) rows.push_back(c.str());
  for (auto c : m.residences) cols.push_back(c.str());
  j["nationalities"] = rows;
  j["residences"] = cols;
  Json cells = Json::array();
  for (const auto& [k, v] : m.cells) cells.push_back({{"nationality", k.first.str()}, {"residence", k.second.str()}, {"migrants", v}});
  j["cells"] = cells;
  j["total"] = m.total();
  return j;
}

inline std::string opt_country(const OptCountry& c) { return c ? c->str() : std::string(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Stages. Each writes its artifacts through the context and returns a JSON
// summary that `report` aggregates.
// ---------------------------------------------------------------------------

inline Json run_ingest(PipelineContext& ctx) {
  ctx.begin("ingest");
  const auto& c = ctx.corpus();
  Json j;
  j["metadata"] = ctx.metadata("ingest");
  j["inputs"] = ctx.ingest_summary();
  j["authors"] = c.tweets.authors().size();
  ctx.write_json("ingest_summary.json", j);
  ctx.log(std::to_string(c.users.size()) + " profiles, " + std::to_string(c.edges.size()) + " edges");
  return j["inputs"];
}

inline Json run_label(PipelineContext& ctx) {
  ctx.begin("label");
  const auto& cfg = ctx.config();
  auto labels = label_users(ctx.corpus(), cfg.labeling);
  std::string jsonl;
  std::size_t migrants = 0, natives = 0, unknown = 0;
  for (const auto& l : labels) {
    jsonl += to_jsonl(l);
    jsonl += '\n';
    migrants += l.status == Status::Migrant;
    natives += l.status == Status::Native;
    unknown += l.status == Status::Unknown;
  }
  ctx.write("labels.jsonl", jsonl);
  auto flows = migration_matrix(labels, cfg.flows_min_count);
  ctx.write("flows.csv", to_csv(flows.filtered));
  ctx.write("flows_full.csv", to_csv(flows.full));

  Json j;
  j["metadata"] = ctx.metadata("label");
  j["users"] = labels.size();
  j["migrants"] = migrants;
  j["natives"] = natives;
  j["unknown"] = unknown;
  j["flows"] = detail::flows_json(flows.filtered);
  j["flows"]["min_count"] = flows.min_count;
  ctx.write_json("label_summary.json", j);
  ctx.set_labels(std::move(labels));
  ctx.log(std::to_string(migrants) + " migrants, " + std::to_string(natives) + " natives, " +
          std::to_string(unknown) + " unknown");
  return j;
}

inline Json run_attachment(PipelineContext& ctx) {
  ctx.begin("attachment");
  const auto& cfg = ctx.config();
  const auto& labels = ctx.labels();
  const auto& corpus = ctx.corpus();
  auto table = build_hashtag_table(native_usages(labels, corpus), cfg.hashtags);
  std::string csv = "hashtag,country,entropy,support\n";
  std::size_t labeled = 0;
  for (const auto& [tag, e] : table.entries) {
    csv += csv_field(tag) + "," + detail::opt_country(e.country) + "," + format_double(e.entropy) + "," +
           std::to_string(e.support) + "\n";
    labeled += e.country.has_value();
  }
  ctx.write("hashtag_table.csv", csv);

  auto batch = score_users(labels, corpus, table);
  csv = "user_id,status,ha,da,labeled_occurrences\n";
  for (const auto& s : batch.scores)
    csv += csv_field(s.user_id) + "," + to_string(s.status) + "," + format_optional(s.ha) + "," +
           format_optional(s.da) + "," + std::to_string(s.labeled_occurrences) + "\n";
  ctx.write("attachment.csv", csv);

  Json hist;
  hist["metadata"] = ctx.metadata("attachment");
  hist["skipped_unknown"] = batch.skipped_unknown;
  Json groups = Json::array();
  Json means = Json::object();
  for (Status g : {Status::Migrant, Status::Native}) {
    auto h = attachment_histograms(batch.scores, g, cfg.attachment_bins);
    Json gj;
    gj["group"] = to_string(g);
    gj["count"] = h.count;
    gj["mean_ha"] = detail::optional_json(h.mean_ha);
    gj["mean_da"] = detail::optional_json(h.mean_da);
    gj["ha"] = detail::histogram_json(h.ha);
    gj["da"] = detail::histogram_json(h.da);
    groups.push_back(gj);
    means[to_string(g)] = {{"count", h.count}, {"mean_ha", gj["mean_ha"]}, {"mean_da", gj["mean_da"]}};
  }
  hist["groups"] = groups;
  ctx.write_json("attachment_histograms.json", hist);

  Json top;
  top["metadata"] = ctx.metadata("attachment");
  top["k"] = cfg.top_hashtags;
  for (Status g : {Status::Migrant, Status::Native}) {
    Json list = Json::array();
    for (const auto& [tag, scaled] : top_hashtags(group_hashtag_counts(labels, corpus, g), cfg.top_hashtags))
      list.push_back({{"hashtag", tag}, {"scaled_count", scaled}});
    top[to_string(g)] = list;
  }
  ctx.write_json("top_hashtags.json", top);

  Json j;
  j["hashtags"] = table.entries.size();
  j["labeled_hashtags"] = labeled;
  j["scored_users"] = batch.scores.size();
  j["means"] = means;
  j["top_hashtags"] = {{"migrant", top["migrant"]}, {"native", top["native"]}};
  ctx.log(std::to_string(labeled) + " of " + std::to_string(table.entries.size()) + " hashtags labeled");
  return j;
}

/// Per-user features compared between migrants and natives.
struct UserFeatures {
  std::string user_id;
  Status status = Status::Unknown;
  bool has_profile = false;
  std::int64_t account_age_days = 0;
  std::uint64_t followers = 0, friends = 0, statuses = 0;
  bool verified = false;
  LocationLanguageCounts tweets;
  LocationLanguageCounts friends_tweets;
};

inline std::vector<UserFeatures> compute_features(const Corpus& corpus, std::span<const UserLabel> labels,
                                                  const PipelineConfig& cfg) {
  std::vector<const UserLabel*> kept;
  for (const auto& l : labels)
    if (l.status != Status::Unknown) kept.push_back(&l);
  std::vector<UserFeatures> out(kept.size());
  parallel_for(kept.size(), [&](std::size_t i) {
    const auto& l = *kept[i];
    auto& f = out[i];
    f.user_id = l.user_id;
    f.status = l.status;
    if (const auto* p = corpus.users.find(l.user_id)) {
      f.has_profile = true;
      f.account_age_days = account_age_days(*p);
      f.followers = p->followers_count;
      f.friends = p->friends_count;
      f.statuses = p->statuses_count;
      f.verified = p->verified;
    }
    f.tweets = recent_tweet_features(l.user_id, corpus, cfg.recent_tweets, cfg.feature_range);
    f.friends_tweets = friend_features(l.user_id, corpus, cfg.recent_tweets, cfg.feature_range);
  });
  return out;
}

inline Json run_features(PipelineContext& ctx) {
  ctx.begin("features");
  auto features = compute_features(ctx.corpus(), ctx.labels(), ctx.config());
  std::string csv =
      "user_id,status,account_age_days,followers_count,friends_count,statuses_count,verified,tweet_countries,"
      "tweet_languages,friend_countries,friend_languages,no_friends\n";
  for (const auto& f : features) {
    csv += csv_field(f.user_id) + "," + to_string(f.status) + ",";
    if (f.has_profile)
      csv += std::to_string(f.account_age_days) + "," + std::to_string(f.followers) + "," +
             std::to_string(f.friends) + "," + std::to_string(f.statuses) + "," + (f.verified ? "1" : "0") + ",";
    else
      csv += ",,,,,";
    csv += std::to_string(f.tweets.n_countries) + "," + std::to_string(f.tweets.n_languages) + "," +
           std::to_string(f.friends_tweets.n_countries) + "," + std::to_string(f.friends_tweets.n_languages) + "," +
           (f.friends_tweets.no_friends ? "1" : "0") + "\n";
  }
  ctx.write("features.csv", csv);
  ctx.log(std::to_string(features.size()) + " users");
  return Json{{"users", features.size()}};
}

inline Json run_compare(PipelineContext& ctx) {
  ctx.begin("compare");
  auto features = compute_features(ctx.corpus(), ctx.labels(), ctx.config());
  struct Column {
    const char* name;
    bool needs_profile;
    double (*get)(const UserFeatures&);
  };
  static const Column columns[] = {
      {"account_age_days", true, [](const UserFeatures& f) { return static_cast<double>(f.account_age_days); }},
      {"friends_count", true, [](const UserFeatures& f) { return static_cast<double>(f.friends); }},
      {"followers_count", true, [](const UserFeatures& f) { return static_cast<double>(f.followers); }},
      {"statuses_count", true, [](const UserFeatures& f) { return static_cast<double>(f.statuses); }},
      {"verified", true, [](const UserFeatures& f) { return f.verified ? 1.0 : 0.0; }},
      {"tweet_countries", false, [](const UserFeatures& f) { return static_cast<double>(f.tweets.n_countries); }},
      {"tweet_languages", false, [](const UserFeatures& f) { return static_cast<double>(f.tweets.n_languages); }},
      {"friend_countries", false,
       [](const UserFeatures& f) { return static_cast<double>(f.friends_tweets.n_countries); }},
      {"friend_languages", false,
       [](const UserFeatures& f) { return static_cast<double>(f.friends_tweets.n_languages); }},
  };
  Json list = Json::array();
  for (const auto& col : columns) {
    std::vector<double> mig, nat;
    for (const auto& f : features) {
      if (col.needs_profile && !f.has_profile) continue;
      (f.status == Status::Migrant ? mig : nat).push_back(col.get(f));
    }
    Json j;
    j["feature"] = col.name;
    j["migrant"] = detail::summary_json(summarize(mig));
    j["native"] = detail::summary_json(summarize(nat));
    if (!mig.empty() && !nat.empty()) {
      auto ks = ks_two_sample(mig, nat);
      j["d"] = ks.d_statistic;
      j["p"] = ks.p_value;
    } else {
      j["d"] = nullptr;
      j["p"] = nullptr;
    }
    list.push_back(j);
  }
  Json out;
  out["metadata"] = ctx.metadata("compare");
  out["method"] = "two-sample Kolmogorov-Smirnov, asymptotic p-value Q((sqrt(ne)+0.12+0.11/sqrt(ne))D)";
  out["comparisons"] = list;
  ctx.write_json("comparisons.json", out);
  ctx.log(std::to_string(list.size()) + " features compared");
  return list;
}

/// Labeled follow graph restricted to the configured scope.
struct ScopedGraph {
  SocialGraph graph;
  std::size_t labeled_nodes = 0;
  std::size_t labeled_edges = 0;
  std::size_t dropped_edges = 0;
};

inline ScopedGraph scoped_graph(PipelineContext& ctx) {
  const auto& labels = ctx.labels();
  auto built = build_graph(ctx.corpus().edges, labels);
  ScopedGraph s;
  s.labeled_nodes = built.graph.num_nodes();
  s.labeled_edges = built.graph.num_edges();
  s.dropped_edges = built.dropped_edges;
  s.graph = ctx.config().graph_scope == "giant" ? giant_component(built.graph) : std::move(built.graph);
  return s;
}

inline Json run_graph(PipelineContext& ctx) {
  ctx.begin("graph");
  const auto& cfg = ctx.config();
  auto sg = scoped_graph(ctx);
  const auto& g = sg.graph;
  ctx.log("graph with " + std::to_string(g.num_nodes()) + " nodes, " + std::to_string(g.num_edges()) + " edges");

  Json summary;
  summary["metadata"] = ctx.metadata("graph");
  summary["scope"] = cfg.graph_scope;
  summary["labeled_nodes"] = sg.labeled_nodes;
  summary["labeled_edges"] = sg.labeled_edges;
  summary["dropped_edges"] = sg.dropped_edges;
  summary["n_nodes"] = g.num_nodes();
  summary["n_edges"] = g.num_edges();
  summary["avg_degree"] = average_degree(g.num_nodes(), g.num_edges());
  summary["reciprocity"] = detail::optional_json(reciprocity(g));
  summary["giant_component_share"] =
      static_cast<double>(g.num_nodes()) / static_cast<double>(std::max<std::size_t>(1, sg.labeled_nodes));
  auto paths = avg_shortest_path(g, cfg.paths);
  summary["avg_shortest_path"] = {{"value", detail::optional_json(paths.value)},
                                  {"reachable_share", paths.reachable_share},
                                  {"std_error", paths.std_error},
                                  {"sources", paths.sources},
                                  {"exact", paths.exact}};
  ctx.log("path lengths");

  auto deg = degree_sequences(g);
  Json fits = Json::object();
  std::string hist_csv = "degree,bin_lo,bin_hi,count\n";
  for (auto [name, seq] : {std::pair{"in", &deg.in}, std::pair{"out", &deg.out}, std::pair{"total", &deg.total}}) {
    try {
      auto fit = fit_power_law(*seq);
      fits[name] = {{"alpha", fit.alpha}, {"xmin", fit.xmin}, {"ks_distance", fit.ks_distance},
                    {"n_tail", fit.n_tail}, {"small_tail", fit.small_tail}};
    } catch (const NumericError& e) {
      fits[name] = {{"error", e.what()}};
    }
    std::vector<double> positive;
    for (auto d : *seq)
      if (d > 0) positive.push_back(static_cast<double>(d));
    if (positive.empty()) continue;
    auto h = histogram(positive, cfg.histogram_bins, true);
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      hist_csv += std::string(name) + "," + format_double(h.edges[b]) + "," + format_double(h.edges[b + 1]) + "," +
                  std::to_string(h.counts[b]) + "\n";
  }
  summary["power_law"] = fits;
  ctx.write("degree_hist.csv", hist_csv);

  std::vector<std::vector<double>> scores;
  for (Measure m : kAllMeasures) {
    if (m == Measure::Betweenness) {
      auto b = betweenness_centrality(g, cfg.centrality);
      summary["betweenness"] = {{"exact", b.exact}, {"sources", b.sources}};
      scores.push_back(std::move(b.scores));
    } else {
      scores.push_back(centrality(g, m, cfg.centrality));
    }
    ctx.log(to_string(m));
  }
  std::string csv = "user_id,status";
  for (Measure m : kAllMeasures) csv += std::string(",") + to_string(m);
  csv += "\n";
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    csv += csv_field(g.user_id(u)) + "," + to_string(g.attributes(u).status);
    for (const auto& s : scores) csv += "," + format_double(s[u]);
    csv += "\n";
  }
  ctx.write("centrality.csv", csv);

  auto corr = centrality_correlations(scores);
  std::string corr_csv = "measure";
  for (Measure m : kAllMeasures) corr_csv += std::string(",") + to_string(m);
  corr_csv += "\n";
  for (std::size_t i = 0; i < corr.size(); ++i) {
    corr_csv += to_string(kAllMeasures[i]);
    for (const auto& r : corr[i]) corr_csv += "," + format_optional(r);
    corr_csv += "\n";
  }
  ctx.write("centrality_correlations.csv", corr_csv);

  Json top;
  top["metadata"] = ctx.metadata("graph");
  top["k"] = cfg.top_k;
  Json tally = Json::object();
  for (std::size_t i = 0; i < kAllMeasures.size(); ++i) {
    auto t = top_k(scores[i], cfg.top_k, g);
    Json users = Json::array();
    for (NodeId u : t.nodes) users.push_back(g.user_id(u));
    top["measures"][to_string(kAllMeasures[i])] = {{"users", users}, {"migrants", t.migrants}, {"natives", t.natives}};
    tally[to_string(kAllMeasures[i])] = {{"migrants", t.migrants}, {"natives", t.natives}};
  }
  ctx.write_json("top_k.json", top);
  summary["top_k_tally"] = tally;
  ctx.write_json("graph_summary.json", summary);
  return summary;
}

inline Json run_assort(PipelineContext& ctx) {
  ctx.begin("assort");
  const auto& cfg = ctx.config();
  auto sg = scoped_graph(ctx);
  const auto& g = sg.graph;

  Json out;
  out["metadata"] = ctx.metadata("assort");
  out["scope"] = cfg.graph_scope;
  out["n_nodes"] = g.num_nodes();
  out["n_edges"] = g.num_edges();
  const bool enough = g.num_edges() >= 2;
  out["degree"] = {{"out_in", enough ? detail::optional_json(degree_assortativity(g, DegreeMode::OutIn)) : Json()},
                   {"total", enough ? detail::optional_json(degree_assortativity(g, DegreeMode::Total)) : Json()}};
  out["alpha_grid"] = cfg.alpha_grid;

  std::vector<Status> statuses(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) statuses[u] = g.attributes(u).status;

  Json categorical = Json::object(), local = Json::object();
  for (Attribute attr : {Attribute::Residence, Attribute::Nationality, Attribute::Status}) {
    const std::string name = to_string(attr);
    if (g.num_edges() == 0) {
      categorical[name] = nullptr;
      local[name] = {{"undefined", "graph has no edges"}};
      continue;
    }
    auto cats = categories(g, attr);
    categorical[name] = detail::optional_json(categorical_assortativity(g, cats));
    try {
      auto res = local_assortativity(g, cats, cfg.alpha_grid);
      std::string csv = "user_id,status,score\n";
      std::vector<double> mig, nat;
      for (NodeId u = 0; u < g.num_nodes(); ++u) {
        csv += csv_field(g.user_id(u)) + "," + to_string(statuses[u]) + "," + format_double(res.scores[u]) + "\n";
        (statuses[u] == Status::Migrant ? mig : nat).push_back(res.scores[u]);
      }
      ctx.write("local_assortativity_" + name + ".csv", csv);
      auto h = assortativity_histograms(res.scores, statuses, cfg.histogram_bins);
      local[name] = {{"global", res.global},
                     {"chance", res.chance},
                     {"migrant", detail::summary_json(summarize(mig))},
                     {"native", detail::summary_json(summarize(nat))},
                     {"histogram", {{"edges", h.edges}, {"migrants", h.migrants}, {"natives", h.natives}}}};
    } catch (const NumericError& e) {
      local[name] = {{"undefined", e.what()}};
    }
    ctx.log(name);
  }
  out["categorical"] = categorical;
  out["local"] = local;
  ctx.write_json("global_assortativity.json", out);
  return out;
}

inline Json run_synth(PipelineContext& ctx) {
  ctx.begin("synth");
  const auto& cfg = ctx.config();
  {
    SynthFileSink sink(ctx.out_dir());
    generate(cfg.synth, sink);
    sink.commit();
  }
  for (const char* f : {"users.jsonl", "tweets.jsonl", "edges.jsonl", "ground_truth.jsonl"}) ctx.record_file(f);
  ctx.log(std::to_string(cfg.synth.n_users) + " users generated");
  return Json{{"users", cfg.synth.n_users}};
}

/// Every analysis stage from raw corpus to report.json.
inline Json run_report(PipelineContext& ctx) {
  Json r;
  r["ingest"] = run_ingest(ctx);
  r["labels"] = run_label(ctx);
  r["labels"].erase("metadata");
  r["attachment"] = run_attachment(ctx);
  run_features(ctx);
  r["comparisons"] = run_compare(ctx);
  r["graph"] = run_graph(ctx);
  r["graph"].erase("metadata");
  r["assortativity"] = run_assort(ctx);
  r["assortativity"].erase("metadata");
  ctx.begin("report");
  Json out;
  out["metadata"] = ctx.metadata("report");
  for (auto& [k, v] : r.items()) out[k] = v;
  ctx.write_json("report.json", out);
  return out;
}

/// Merges this run's artifacts into <out>/manifest.json. Entries written by
/// earlier runs stay unless rewritten now.
inline Json write_manifest(const PipelineContext& ctx) {
  const auto path = ctx.out_dir() / "manifest.json";
  std::map<std::string, Json> entries;
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) {
    auto old = nlohmann::ordered_json::parse(read_file(path), nullptr, false);
    if (!old.is_discarded() && old.contains("artifacts") && old["artifacts"].is_array())
      for (const auto& a : old["artifacts"])
        if (a.contains("path") && a["path"].is_string() && fs::exists(ctx.out_dir() / a["path"].get<std::string>()))
          entries[a["path"].get<std::string>()] = a;
  }
  for (const auto& a : ctx.artifacts())
    entries[a.name] = Json{{"path", a.name}, {"stage", a.stage}, {"sha256", a.sha256}, {"bytes", a.bytes}};

  Json m;
  m["schema_version"] = kSchemaVersion;
  m["tool"] = "mignet";
  m["stages"] = ctx.stages();
  m["config"] = config_echo(ctx.config());
  m["paths"] = {{"out", ctx.config().out_dir},
                {"users", ctx.config().users_path().string()},
                {"tweets", ctx.config().tweets_path().string()},
                {"edges", ctx.config().edges_path().string()},
                {"labels", ctx.config().labels_path().string()}};
  Json inputs = Json::object();
  for (const auto& [role, p] : ctx.inputs()) inputs[role] = {{"path", p.string()}, {"sha256", sha256_file(p)}};
  m["inputs"] = inputs;
  Json list = Json::array();
  for (auto& [k, v] : entries) list.push_back(v);
  m["artifacts"] = list;
  write_atomic(path, m.dump(2) + "\n");
  return m;
}

}  // namespace mignet
