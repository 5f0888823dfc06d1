// oppscreen command-line front end; talks to the library only through the C API.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oppscreen/oppscreen.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

struct Overrides {
  std::string config;
  std::optional<std::string> seed, out, folds, depth;
  std::vector<std::string> set;
  bool json = false;
};

int fail(oppscreen_status s) {
  std::cerr << "oppscreen: " << oppscreen_status_name(s) << ": " << oppscreen_last_error() << "\n";
  return s == OPPSCREEN_INVALID_ARGUMENT ? kExitUsage : kExitError;
}

class Config {
 public:
  Config() {
    if (oppscreen_config_new(&cfg_) != OPPSCREEN_OK) cfg_ = nullptr;
  }
  ~Config() { oppscreen_config_free(cfg_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  oppscreen_config* get() const { return cfg_; }

  // file < env < flags
  oppscreen_status build(const Overrides& o, const char* depth_key) {
    if (!cfg_) return OPPSCREEN_INTERNAL_ERROR;
    oppscreen_status s = OPPSCREEN_OK;
    if (!o.config.empty() && (s = oppscreen_config_load(cfg_, o.config.c_str())) != OPPSCREEN_OK) return s;
    if ((s = oppscreen_config_apply_env(cfg_)) != OPPSCREEN_OK) return s;
    for (const auto& kv : o.set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "oppscreen: --set expects key=value, got '" << kv << "'\n";
        return OPPSCREEN_INVALID_ARGUMENT;
      }
      const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
      if ((s = oppscreen_config_set(cfg_, key.c_str(), value.c_str(), ("--set " + key).c_str())) != OPPSCREEN_OK) return s;
    }
    if ((s = flag("seed", o.seed, "--seed")) != OPPSCREEN_OK) return s;
    if ((s = flag("out", o.out, "--out")) != OPPSCREEN_OK) return s;
    if ((s = flag("experiment.folds", o.folds, "--folds")) != OPPSCREEN_OK) return s;
    if ((s = flag(depth_key, o.depth, "--depth")) != OPPSCREEN_OK) return s;
    return OPPSCREEN_OK;
  }

  oppscreen_status flag(const char* key, const std::optional<std::string>& v, const char* origin) {
    return v ? oppscreen_config_set(cfg_, key, v->c_str(), origin) : OPPSCREEN_OK;
  }

 private:
  oppscreen_config* cfg_ = nullptr;
};

int emit(oppscreen_status s, char* summary, bool as_json) {
  if (s != OPPSCREEN_OK) return fail(s);
  const auto j = nlohmann::json::parse(summary);
  oppscreen_string_free(summary);
  if (as_json || !j.contains("text")) {
    nlohmann::json copy = j;
    copy.erase("text");
    std::cout << copy.dump(2) << "\n";
  } else {
    std::cout << j.at("text").get<std::string>();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Financial opportunity screening for finance micro-blog posts"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config, "TOML-style config file")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Random seed (config key seed)");
  app.add_option("--out", o.out, "Output directory (config key out)");
  app.add_option("--folds", o.folds, "Cross-validation folds (experiment.folds)");
  app.add_option("--depth", o.depth, "Decision depth in [0, 1], or auto for train/experiment");
  app.add_option("--set", o.set, "Override any config key, key=value (repeatable)");
  app.add_flag("--json", o.json, "Print the JSON summary instead of text");

  std::optional<std::string> input, output, model, metric;
  std::vector<int> protocols, layers;
  std::vector<std::string> reports;

  auto* pre = app.add_subcommand("preprocess", "Filter, deduplicate and preprocess a labelled dataset");
  pre->add_option("--input", input, "Dataset file (dataset.path)");
  pre->add_option("--output", output, "Processed JSONL (dataset.processed)");

  auto* grid = app.add_subcommand("grid-search", "Cross-validated grid search for each cascade layer");
  grid->add_option("--layer", layers, "Layer(s) to tune (grid.layers)")->check(CLI::Range(1, 3));
  grid->add_option("--metric", metric, "accuracy, precision or f1 (grid.metric)");

  auto* train = app.add_subcommand("train", "Train a cascade and save the model bundle");
  train->add_option("--model", model, "Bundle directory (classify.model)");

  auto* exp = app.add_subcommand("experiment", "Run numerical tests under k-fold cross-validation");
  exp->add_option("--protocol", protocols, "Protocol(s) 1..4; several give delta tables")
      ->check(CLI::Range(1, 4))
      ->delimiter(',');

  auto* cls = app.add_subcommand("classify", "Flag opportunities in new tweets with a saved bundle");
  cls->add_option("--model", model, "Bundle directory (classify.model)");
  cls->add_option("--input", input, "Raw dataset or processed JSONL (classify.input)");

  auto* rep = app.add_subcommand("report", "Render saved experiment reports");
  rep->add_option("reports", reports, "experiment-p*.json files (default: all in --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  Config cfg;
  const bool classify = cls->parsed();
  oppscreen_status s = cfg.build(o, classify ? "classify.depth" : "cascade.depth");
  if (s != OPPSCREEN_OK) return fail(s);

  auto set = [&](const char* key, const std::optional<std::string>& v, const char* origin) {
    return cfg.flag(key, v, origin);
  };
  char* summary = nullptr;
  if (pre->parsed()) {
    if ((s = set("dataset.path", input, "--input")) != OPPSCREEN_OK) return fail(s);
    if ((s = set("dataset.processed", output, "--output")) != OPPSCREEN_OK) return fail(s);
    s = oppscreen_run_preprocess(cfg.get(), &summary);
    return emit(s, summary, o.json);
  }
  if (grid->parsed()) {
    if (!layers.empty()) {
      const std::string list = nlohmann::json(layers).dump();
      if ((s = oppscreen_config_set(cfg.get(), "grid.layers", list.c_str(), "--layer")) != OPPSCREEN_OK) return fail(s);
    }
    if ((s = set("grid.metric", metric, "--metric")) != OPPSCREEN_OK) return fail(s);
    s = oppscreen_run_grid_search(cfg.get(), &summary);
    return emit(s, summary, o.json);
  }
  if (train->parsed()) {
    if ((s = set("classify.model", model, "--model")) != OPPSCREEN_OK) return fail(s);
    s = oppscreen_run_train(cfg.get(), &summary);
    return emit(s, summary, o.json);
  }
  if (exp->parsed()) {
    s = oppscreen_run_experiment(cfg.get(), protocols.data(), protocols.size(), &summary);
    return emit(s, summary, o.json);
  }
  if (classify) {
    if ((s = set("classify.model", model, "--model")) != OPPSCREEN_OK) return fail(s);
    if ((s = set("classify.input", input, "--input")) != OPPSCREEN_OK) return fail(s);
    s = oppscreen_run_classify(cfg.get(), &summary);
    return emit(s, summary, o.json);
  }
  std::vector<const char*> paths;
  for (const auto& r : reports) paths.push_back(r.c_str());
  s = oppscreen_run_report(cfg.get(), paths.data(), paths.size(), &summary);
    return emit(s, summary, o.json);
}
