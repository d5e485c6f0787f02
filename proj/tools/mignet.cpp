#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mignet/pipeline.hpp"

namespace {

using mignet::Json;
using mignet::PipelineContext;

constexpr const char* kFooter = R"(Configuration precedence (lowest first): built-in defaults, --config file,
MIGNET_* environment variables (key upper-cased, '.' replaced by '_'), then
--set and dedicated flags. Run `mignet --list-keys` for every key.

Config file grammar: one `key = value` per line; '#' starts a comment.

Exit codes:
  0  success
  1  internal error
  2  usage error (bad flags or subcommand)
  3  missing input (a stage ran before the stage that feeds it)
  4  validation error (bad config value, malformed input schema)
  5  numeric failure (non-convergence, undefined quantity)
  6  I/O error
  7  empty input (no valid records)
  8  not found
On failure a JSON record {"error": {"kind", "message", "exit_code"}} is
printed to stderr.)";

void print_error(const std::string& kind, const std::string& message, int code) {
  Json j;
  j["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << "\n";
}

void list_keys() {
  const mignet::PipelineConfig defaults;
  for (const auto& k : mignet::config_keys()) {
    std::cout << k.name << " = " << k.get(defaults) << "\n    " << k.help << "  [" << mignet::env_name(k.name)
              << "]\n";
  }
}

struct Options {
  std::string config_file;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;  // key, value from dedicated flags
  bool list = false;
};

mignet::PipelineConfig resolve_config(const Options& opt) {
  mignet::PipelineConfig cfg;
  if (!opt.config_file.empty()) mignet::apply_config_file(cfg, opt.config_file);
  mignet::apply_environment(cfg);
  for (const auto& s : opt.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw mignet::ValidationError("--set expects key=value, got '" + s + "'");
    mignet::set_key(cfg, mignet::detail::trim(std::string_view(s).substr(0, eq)), std::string_view(s).substr(eq + 1));
  }
  for (const auto& [k, v] : opt.flags) mignet::set_key(cfg, k, v);
  return cfg;
}

/// Binds a string flag that is forwarded to a config key when given.
void key_flag(CLI::App* app, Options& opt, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&opt, key](const std::string& v) { opt.flags.emplace_back(key, v); }, help + " (key: " + key + ")");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mignet: migrant identification, hashtag attachment and follow-network analysis"};
  app.footer(kFooter);
  app.fallthrough();
  app.require_subcommand(0, 1);

  Options opt;
  app.add_option("-c,--config", opt.config_file, "key = value configuration file");
  app.add_option("-s,--set", opt.sets, "override one config key (key=value), repeatable");
  key_flag(&app, opt, "-o,--out", "out", "output directory");
  key_flag(&app, opt, "--threads", "threads", "worker thread cap");
  key_flag(&app, opt, "--users", "users", "profiles input");
  key_flag(&app, opt, "--tweets", "tweets", "tweets input");
  key_flag(&app, opt, "--edges", "edges", "follow-edge input");
  key_flag(&app, opt, "--labels", "labels", "labels input");
  app.add_flag("--list-keys", opt.list, "print every config key with its default and exit");

  using Stage = std::function<void(PipelineContext&)>;
  std::vector<std::pair<CLI::App*, Stage>> stages;
  auto stage = [&](const char* name, const char* help, Stage fn) {
    auto* sub = app.add_subcommand(name, help);
    stages.emplace_back(sub, std::move(fn));
    return sub;
  };
  stage("ingest", "parse the corpus and write ingestion diagnostics", [](auto& c) { mignet::run_ingest(c); });
  stage("label", "infer residence, nationality and migrant status", [](auto& c) { mignet::run_label(c); });
  stage("attachment", "build the hashtag table and per-user home/destination attachment",
        [](auto& c) { mignet::run_attachment(c); });
  stage("features", "per-user profile, location and language features", [](auto& c) { mignet::run_features(c); });
  stage("compare", "KS comparison of migrant and native features", [](auto& c) { mignet::run_compare(c); });
  stage("graph", "follow-graph statistics, centrality and degree fits", [](auto& c) { mignet::run_graph(c); });
  stage("assort", "degree, categorical and local assortativity", [](auto& c) { mignet::run_assort(c); });
  stage("report", "run every analysis stage and aggregate report.json", [](auto& c) { mignet::run_report(c); });
  auto* synth = stage("synth", "generate a synthetic corpus with planted homophily", [](auto& c) { mignet::run_synth(c); });
  key_flag(synth, opt, "--n-users", "synth.n_users", "number of users");
  key_flag(synth, opt, "--migrant-fraction", "synth.migrant_fraction", "share of migrants");
  key_flag(synth, opt, "--countries", "synth.countries", "comma-separated country codes");
  key_flag(synth, opt, "--p-in", "synth.p_in", "within-group edge probability");
  key_flag(synth, opt, "--p-out", "synth.p_out", "between-group edge probability");
  key_flag(synth, opt, "--seed", "synth.seed", "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what(), 2);
    return 2;
  }

  if (opt.list) {
    list_keys();
    return 0;
  }
  const auto chosen = std::find_if(stages.begin(), stages.end(), [](const auto& s) { return s.first->parsed(); });
  if (chosen == stages.end()) {
    std::cerr << app.help();
    print_error("usage", "a subcommand is required", 2);
    return 2;
  }

  try {
    PipelineContext ctx(resolve_config(opt));
    chosen->second(ctx);
    auto manifest = mignet::write_manifest(ctx);
    Json done;
    done["subcommand"] = chosen->first->get_name();
    done["written"] = ctx.artifacts().size();
    done["manifest"] = (ctx.out_dir() / "manifest.json").string();
    done["artifacts"] = manifest["artifacts"].size();
    std::cout << done.dump() << "\n";
    return 0;
  } catch (const mignet::Error& e) {
    const int code = mignet::exit_code(e.kind());
    print_error(mignet::to_string(e.kind()), e.what(), code);
    return code;
  } catch (const std::filesystem::filesystem_error& e) {
    const int code = mignet::exit_code(mignet::ErrorKind::Io);
    print_error("io", e.what(), code);
    return code;
  } catch (const std::exception& e) {
    print_error("internal", e.what(), 1);
    return 1;
  }
}
