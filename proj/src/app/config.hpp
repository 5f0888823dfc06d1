#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/cascade.hpp"
#include "core/corpus.hpp"
#include "core/evaluation.hpp"
#include "core/learners.hpp"
#include "core/preprocess.hpp"
#include "json.hpp"

namespace oppscreen {

// Key/value run configuration. Keys are dotted ("train.trees"); a file uses
// [section] headers and `key = value` lines where the value is JSON (strings
// may also be bare or single-quoted) and '#' starts a comment.
//
// Precedence, lowest first: built-in defaults, config file, OPPSCREEN_* env
// variables, command-line flags. Each layer is applied by the caller in that
// order; a later set() always wins.
class ConfigDocument {
 public:
  ConfigDocument();  // built-in defaults

  // Merges a file; relative paths in it resolve against its directory.
  void load_file(const std::filesystem::path& path);
  void parse(std::string_view content, std::string_view source, const std::filesystem::path& base_dir);

  // OPPSCREEN_ + key upper-cased with '.' -> '_', e.g. OPPSCREEN_TRAIN_TREES.
  using EnvLookup = std::function<const char*(const char*)>;
  void apply_env(const EnvLookup& lookup);
  static std::string env_name(std::string_view key);

  // Value text as it would appear in a file; relative paths resolve against cwd.
  void set(std::string_view key, std::string_view text, std::string_view origin = "set");
  void set_json(std::string_view key, const nlohmann::json& value, std::string_view origin = "set");

  const nlohmann::json& get(std::string_view key) const;
  bool is_default(std::string_view key) const;
  std::string origin(std::string_view key) const;
  static bool known(std::string_view key);
  static std::vector<std::string> keys();

  nlohmann::json to_json() const;

 private:
  struct Entry {
    nlohmann::json value;
    std::string origin;  // "default", "file:line", "env NAME", "--flag"
  };
  std::map<std::string, Entry, std::less<>> entries_;

  void assign(std::string_view key, nlohmann::json value, std::string origin, const std::filesystem::path& base);
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out;

  std::optional<std::filesystem::path> dataset;
  std::optional<DatasetFormat> format;  // empty = from the extension
  std::filesystem::path processed;

  ResourcePaths preprocess_paths;
  FilterConfig filter;
  std::size_t max_edit = 2;
  std::filesystem::path polarity, emotion, emoji, adverbs;

  CascadeConfig cascade;
  DepthPolicy depth;
  std::size_t folds = 10;
  std::vector<int> protocols;
  std::vector<double> sweep_depths;

  ParamGrid grid;
  std::size_t grid_folds = 10;
  Metric grid_metric = Metric::Precision;
  std::vector<std::size_t> grid_layers;  // 1-based; empty = every layer

  std::filesystem::path model;
  std::optional<std::filesystem::path> classify_input;
  bool classify_filter = true;
  std::optional<double> classify_depth;  // empty = the bundle's depth

  // Experiment settings for one protocol (architecture follows the protocol).
  ExperimentConfig experiment(int protocol) const;
};

// Builds and validates the typed configuration; errors name the key and
// where its value came from.
RunConfig resolve(const ConfigDocument& doc);

}  // namespace oppscreen
