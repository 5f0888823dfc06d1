#include "app/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/text.hpp"

namespace oppscreen {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class Kind { Integer, Number, Boolean, String, Path, NumberList, IntegerList, Depth, Grid };

struct KeySpec {
  Kind kind;
  json fallback;  // null = unset
};

const std::vector<std::pair<std::string, Kind>>& train_keys() {
  static const std::vector<std::pair<std::string, Kind>> keys{
      {"algorithm", Kind::String},   {"learning_rate", Kind::Number}, {"epochs", Kind::Integer},
      {"l2", Kind::Number},          {"batch_size", Kind::Integer},   {"max_depth", Kind::Integer},
      {"min_leaf", Kind::Integer},   {"trees", Kind::Integer},        {"bootstrap", Kind::Boolean},
      {"max_features", Kind::Integer}, {"lambda", Kind::Number},      {"svc_epochs", Kind::Integer},
      {"calibration_fraction", Kind::Number}};
  return keys;
}

const char* const kGramFamilies[] = {"char", "char_wb", "word"};

const std::vector<std::pair<std::string, std::string>>& resource_files() {
  static const std::vector<std::pair<std::string, std::string>> files{
      {"lexicon", "es_frequency.tsv"}, {"lemmas", "lemmas.tsv"},       {"stopwords", "stopwords.txt"},
      {"keepwords", "keepwords.txt"},  {"spam", "spam.txt"},           {"index_hashtags", "index_hashtags.txt"},
      {"polarity", "polarity.tsv"},    {"emotion", "emotion.tsv"},     {"emoji", "emoji.tsv"},
      {"adverbs", "adverbs.txt"}};
  return files;
}

const std::map<std::string, KeySpec, std::less<>>& schema() {
  static const auto table = [] {
    std::map<std::string, KeySpec, std::less<>> s;
    s["seed"] = {Kind::Integer, nullptr};
    s["out"] = {Kind::Path, "out"};

    s["dataset.path"] = {Kind::Path, nullptr};
    s["dataset.format"] = {Kind::String, "auto"};
    s["dataset.processed"] = {Kind::Path, nullptr};

    s["resources.dir"] = {Kind::Path, nullptr};
    for (const auto& [k, file] : resource_files()) s["resources." + k] = {Kind::Path, nullptr};

    const FilterConfig filter;
    s["filter.language_coverage_threshold"] = {Kind::Number, filter.language_coverage_threshold};
    s["filter.jaccard_threshold"] = {Kind::Number, filter.jaccard_threshold};
    s["filter.require_finance_marker"] = {Kind::Boolean, filter.require_finance_marker};
    s["filter.max_edit"] = {Kind::Integer, 2};

    const GramConfig g;
    for (const char* f : kGramFamilies) {
      const std::string p = std::string("grams.") + f + ".";
      s[p + "ngram_min"] = {Kind::Integer, g.ngram_min};
      s[p + "ngram_max"] = {Kind::Integer, g.ngram_max};
      s[p + "max_df"] = {Kind::Number, g.max_df};
      s[p + "min_df"] = {Kind::Number, g.min_df};
      s[p + "max_features"] = {Kind::Integer, nullptr};
    }
    s["features.percentile"] = {Kind::Number, FeaturePipelineConfig{}.percentile};
    s["features.set"] = {Kind::String, "all"};
    s["features.selection"] = {Kind::String, "layer"};

    const json train = TrainConfig{}.to_json();
    for (const auto& [k, kind] : train_keys()) {
      s["train." + k] = {kind, train.at(k)};
      for (int l = 1; l <= 3; ++l) s["layer" + std::to_string(l) + "." + k] = {kind, nullptr};
    }
    for (int l = 1; l <= 3; ++l) {
      s["layer" + std::to_string(l) + ".percentile"] = {Kind::Number, nullptr};
      s["layer" + std::to_string(l) + ".feature_set"] = {Kind::String, nullptr};
    }

    const DepthPolicy depth;
    s["cascade.architecture"] = {Kind::String, "three"};
    s["cascade.depth"] = {Kind::Depth, depth.fixed};
    s["cascade.coverage_target"] = {Kind::Number, depth.coverage_target};
    s["cascade.candidates"] = {Kind::NumberList, depth.candidates};
    s["cascade.inner_folds"] = {Kind::Integer, depth.inner_folds};

    const ExperimentConfig e;
    s["experiment.folds"] = {Kind::Integer, e.folds};
    s["experiment.protocols"] = {Kind::IntegerList, json::array({4})};
    s["experiment.sweep_depths"] = {Kind::NumberList, e.sweep_depths};

    s["grid.shipped"] = {Kind::Boolean, true};
    s["grid.folds"] = {Kind::Integer, nullptr};
    s["grid.metric"] = {Kind::String, "precision"};
    s["grid.layers"] = {Kind::IntegerList, json::array()};
    for (const char* k : {"max_df", "min_df", "ngram_range", "max_features", "percentile", "use_dense"}) {
      s[std::string("grid.") + k] = {Kind::Grid, nullptr};
    }
    for (const auto& [k, kind] : train_keys()) {
      if (k != "max_features") s["grid." + k] = {Kind::Grid, nullptr};
    }

    s["classify.input"] = {Kind::Path, nullptr};
    s["classify.model"] = {Kind::Path, nullptr};
    s["classify.filter"] = {Kind::Boolean, true};
    s["classify.depth"] = {Kind::Depth, nullptr};
    return s;
  }();
  return table;
}

const KeySpec& spec_of(std::string_view key) {
  const auto it = schema().find(key);
  if (it == schema().end()) throw Error(ErrorKind::InvalidArgument, "unknown key '" + std::string(key) + "'");
  return it->second;
}

// Cuts a trailing '#' comment that is not inside a string.
std::string strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\' && quote == '"') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\' && quote == '"') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

json parse_value_text(std::string_view raw) {
  const std::string t = text::trim(raw);
  if (t.empty()) throw Error(ErrorKind::Parse, "empty value");
  if (t.size() >= 2 && t.front() == '\'' && t.back() == '\'') return t.substr(1, t.size() - 2);
  try {
    return json::parse(t);
  } catch (const json::exception&) {
    if (t.front() == '"' || t.front() == '[' || t.front() == '{') throw Error(ErrorKind::Parse, "malformed value " + t);
    return t;  // bare string
  }
}

// Env and flag text: a path or string key keeps the raw text even when it
// happens to parse as JSON (a directory named 2020, say).
json parse_for(std::string_view key, std::string_view raw) {
  const Kind k = spec_of(key).kind;
  json v = parse_value_text(raw);
  if ((k == Kind::Path || k == Kind::String) && !v.is_string() && !v.is_null()) return text::trim(raw);
  return v;
}

bool is_count(const json& v) {
  if (v.is_number_unsigned()) return true;
  if (v.is_number_integer()) return v.get<std::int64_t>() >= 0;
  return false;
}

json coerce_list(const json& v, bool integers) {
  json arr = v;
  if (v.is_string()) {
    // "1,4" from env or flags
    arr = json::array();
    std::string s = v.get<std::string>();
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const std::size_t end = std::min(s.find(',', pos), s.size());
      arr.push_back(parse_value_text(s.substr(pos, end - pos)));
      pos = end + 1;
    }
  } else if (v.is_number()) {
    arr = json::array({v});
  }
  if (!arr.is_array()) throw Error(ErrorKind::InvalidArgument, "expected a list");
  for (const auto& x : arr) {
    if (integers ? !x.is_number_integer() : !x.is_number()) {
      throw Error(ErrorKind::InvalidArgument, integers ? "expected a list of integers" : "expected a list of numbers");
    }
  }
  return arr;
}

json coerce(Kind kind, const json& v, const fs::path& base) {
  if (v.is_null()) return v;
  switch (kind) {
    case Kind::Integer:
      if (!is_count(v)) throw Error(ErrorKind::InvalidArgument, "expected a non-negative integer, got " + v.dump());
      return v;
    case Kind::Number:
      if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, "expected a number, got " + v.dump());
      return v;
    case Kind::Boolean:
      if (!v.is_boolean()) throw Error(ErrorKind::InvalidArgument, "expected true or false, got " + v.dump());
      return v;
    case Kind::String:
      if (!v.is_string()) throw Error(ErrorKind::InvalidArgument, "expected a string, got " + v.dump());
      return v;
    case Kind::Path: {
      if (!v.is_string() || v.get<std::string>().empty()) {
        throw Error(ErrorKind::InvalidArgument, "expected a path, got " + v.dump());
      }
      fs::path p = v.get<std::string>();
      if (p.is_relative() && !base.empty()) p = base / p;
      return p.lexically_normal().string();
    }
    case Kind::NumberList: return coerce_list(v, false);
    case Kind::IntegerList: return coerce_list(v, true);
    case Kind::Depth:
      if (v.is_string() && v.get<std::string>() == "auto") return v;
      if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, "expected a depth in [0, 1] or \"auto\", got " + v.dump());
      return v;
    case Kind::Grid:
      if (!v.is_array() || v.empty()) throw Error(ErrorKind::InvalidArgument, "expected a non-empty list of candidates");
      return v;
  }
  return v;
}

}  // namespace

ConfigDocument::ConfigDocument() {
  for (const auto& [k, spec] : schema()) entries_[k] = {spec.fallback, "default"};
}

void ConfigDocument::assign(std::string_view key, json value, std::string origin, const fs::path& base) {
  const KeySpec& spec = spec_of(key);
  json v;
  try {
    v = coerce(spec.kind, value, base);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(key) + ": " + e.what());
  }
  entries_[std::string(key)] = {std::move(v), std::move(origin)};
}

void ConfigDocument::load_file(const fs::path& path) {
  parse(io::read_file(path), path.string(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

void ConfigDocument::parse(std::string_view content, std::string_view source, const fs::path& base_dir) {
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string& out) {
    if (pos >= content.size()) return false;
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    out = std::string(content.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    return true;
  };
  std::string raw;
  while (next_line(raw)) {
    const std::size_t start_line = line_no;
    const std::string where = std::string(source) + ":" + std::to_string(start_line);
    std::string line = text::trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') throw Error(ErrorKind::Parse, where + ": unterminated section header");
      section = text::trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw Error(ErrorKind::Parse, where + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, where + ": expected key = value");
    const std::string name = text::trim(line.substr(0, eq));
    std::string value = text::trim(line.substr(eq + 1));
    // arrays may continue over several lines
    while (bracket_balance(value) > 0) {
      std::string more;
      if (!next_line(more)) throw Error(ErrorKind::Parse, where + ": unterminated list");
      value += " " + text::trim(strip_comment(more));
    }
    if (name.empty()) throw Error(ErrorKind::Parse, where + ": missing key");
    const std::string key = section.empty() ? name : section + "." + name;
    if (!known(key)) throw Error(ErrorKind::Parse, where + ": unknown key '" + key + "'");
    try {
      assign(key, parse_value_text(value), where, base_dir);
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, where + ": " + e.what());
    }
  }
}

std::string ConfigDocument::env_name(std::string_view key) {
  std::string n = "OPPSCREEN_";
  for (char c : key) n += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return n;
}

void ConfigDocument::apply_env(const EnvLookup& lookup) {
  for (const auto& [key, spec] : schema()) {
    const std::string name = env_name(key);
    const char* v = lookup(name.c_str());
    if (!v) continue;
    try {
      assign(key, parse_for(key, v), "env " + name, {});
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidArgument, name + ": " + e.what());
    }
  }
}

void ConfigDocument::set(std::string_view key, std::string_view value_text, std::string_view origin) {
  if (!known(key)) throw Error(ErrorKind::InvalidArgument, std::string(origin) + ": unknown key '" + std::string(key) + "'");
  try {
    assign(key, parse_for(key, value_text), std::string(origin), {});
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string(origin) + ": " + e.what());
  }
}

void ConfigDocument::set_json(std::string_view key, const json& value, std::string_view origin) {
  if (!known(key)) throw Error(ErrorKind::InvalidArgument, std::string(origin) + ": unknown key '" + std::string(key) + "'");
  try {
    assign(key, value, std::string(origin), {});
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string(origin) + ": " + e.what());
  }
}

const json& ConfigDocument::get(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw Error(ErrorKind::InvalidArgument, "unknown key '" + std::string(key) + "'");
  return it->second.value;
}

bool ConfigDocument::is_default(std::string_view key) const { return origin(key) == "default"; }

std::string ConfigDocument::origin(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw Error(ErrorKind::InvalidArgument, "unknown key '" + std::string(key) + "'");
  return it->second.origin;
}

bool ConfigDocument::known(std::string_view key) { return schema().count(key) > 0; }

std::vector<std::string> ConfigDocument::keys() {
  std::vector<std::string> out;
  for (const auto& [k, spec] : schema()) out.push_back(k);
  return out;
}

json ConfigDocument::to_json() const {
  json j = json::object();
  for (const auto& [k, e] : entries_) j[k] = e.value;
  return j;
}

ExperimentConfig RunConfig::experiment(int protocol) const {
  ExperimentConfig e;
  e.protocol = protocol;
  e.folds = folds;
  e.seed = seed;
  e.cascade = cascade;
  e.cascade.architecture = protocol_architecture(protocol);
  e.depth = depth;
  e.sweep_depths = sweep_depths;
  return e;
}

RunConfig resolve(const ConfigDocument& doc) {
  auto where = [&](const std::string& key) { return key + " (" + doc.origin(key) + ")"; };
  auto fail = [&](const std::string& key, const std::string& msg) -> void {
    throw Error(ErrorKind::InvalidArgument, where(key) + ": " + msg);
  };
  auto get = [&](const std::string& key) -> const json& { return doc.get(key); };
  auto path_or = [&](const std::string& key, const fs::path& fallback) {
    const auto& v = get(key);
    return v.is_null() ? fallback : fs::path(v.get<std::string>());
  };
  // Runs fn and prefixes errors with the key.
  auto guarded = [&](const std::string& key, auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidArgument, where(key) + ": " + e.what());
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidArgument, where(key) + ": " + e.what());
    }
  };

  RunConfig rc;
  if (get("seed").is_null()) {
    throw Error(ErrorKind::InvalidArgument, "seed is required (config key seed, OPPSCREEN_SEED or --seed)");
  }
  rc.seed = get("seed").get<std::uint64_t>();
  rc.out = get("out").get<std::string>();

  if (!get("dataset.path").is_null()) rc.dataset = fs::path(get("dataset.path").get<std::string>());
  const std::string fmt = get("dataset.format").get<std::string>();
  if (fmt != "auto") guarded("dataset.format", [&] { rc.format = parse_dataset_format(fmt); });
  rc.processed = path_or("dataset.processed", rc.out / "processed.jsonl");

  const auto& dir = get("resources.dir");
  std::map<std::string, fs::path> res;
  for (const auto& [k, file] : resource_files()) {
    const auto& v = get("resources." + k);
    if (!v.is_null()) res[k] = v.get<std::string>();
    else if (!dir.is_null()) res[k] = fs::path(dir.get<std::string>()) / file;
  }
  rc.preprocess_paths = {res["lexicon"], res["lemmas"], res["stopwords"], res["keepwords"], res["spam"],
                         res["index_hashtags"]};
  rc.polarity = res["polarity"];
  rc.emotion = res["emotion"];
  rc.emoji = res["emoji"];
  rc.adverbs = res["adverbs"];

  rc.filter.language_coverage_threshold = get("filter.language_coverage_threshold").get<double>();
  rc.filter.jaccard_threshold = get("filter.jaccard_threshold").get<double>();
  rc.filter.require_finance_marker = get("filter.require_finance_marker").get<bool>();
  guarded("filter.jaccard_threshold", [&] { rc.filter.validate(); });
  rc.max_edit = get("filter.max_edit").get<std::size_t>();

  FeaturePipelineConfig features;
  GramConfig* grams[] = {&features.chars, &features.char_words, &features.words};
  for (int f = 0; f < 3; ++f) {
    const std::string p = std::string("grams.") + kGramFamilies[f] + ".";
    GramConfig& g = *grams[f];
    g.ngram_min = get(p + "ngram_min").get<std::size_t>();
    g.ngram_max = get(p + "ngram_max").get<std::size_t>();
    g.max_df = get(p + "max_df").get<double>();
    g.min_df = get(p + "min_df").get<double>();
    if (!get(p + "max_features").is_null()) g.max_features = get(p + "max_features").get<std::size_t>();
    guarded(p + "ngram_max", [&] { g.validate(); });
  }
  features.percentile = get("features.percentile").get<double>();
  auto feature_set = [&](const std::string& key) {
    const std::string s = get(key).get<std::string>();
    if (s != "all" && s != "basic") fail(key, "feature set must be \"all\" or \"basic\"");
    return s == "all";
  };
  features.use_dense = feature_set("features.set");
  guarded("features.percentile", [&] { features.validate(); });
  const std::string selection = get("features.selection").get<std::string>();
  if (selection != "layer" && selection != "global") fail("features.selection", "must be \"layer\" or \"global\"");
  rc.cascade.global_selection = selection == "global";

  TrainConfig base;
  for (const auto& [k, kind] : train_keys()) {
    guarded("train." + k, [&] { base.set(k, get("train." + k)); });
  }
  guarded("train.algorithm", [&] { base.validate(); });
  for (std::size_t l = 0; l < 3; ++l) {
    const std::string p = "layer" + std::to_string(l + 1) + ".";
    TrainConfig t = base;
    for (const auto& [k, kind] : train_keys()) {
      if (!get(p + k).is_null()) guarded(p + k, [&] { t.set(k, get(p + k)); });
    }
    guarded(p + "algorithm", [&] { t.validate(); });
    rc.cascade.train[l] = t;
    FeaturePipelineConfig fl = features;
    if (!get(p + "percentile").is_null()) fl.percentile = get(p + "percentile").get<double>();
    if (!get(p + "feature_set").is_null()) fl.use_dense = feature_set(p + "feature_set");
    guarded(p + "percentile", [&] { fl.validate(); });
    rc.cascade.features[l] = fl;
  }

  guarded("cascade.architecture",
          [&] { rc.cascade.architecture = parse_architecture(get("cascade.architecture").get<std::string>()); });
  const auto& depth = get("cascade.depth");
  rc.depth.automatic = depth.is_string();
  if (depth.is_number()) rc.depth.fixed = depth.get<double>();
  rc.depth.coverage_target = get("cascade.coverage_target").get<double>();
  rc.depth.candidates = get("cascade.candidates").get<std::vector<double>>();
  rc.depth.inner_folds = get("cascade.inner_folds").get<std::size_t>();
  guarded("cascade.depth", [&] { rc.depth.validate(); });
  rc.cascade.depth = rc.depth.fixed;
  rc.cascade.seed = rc.seed;
  guarded("cascade.architecture", [&] { rc.cascade.validate(); });

  rc.folds = get("experiment.folds").get<std::size_t>();
  if (rc.folds < 2) fail("experiment.folds", "folds must be at least 2");
  rc.protocols = get("experiment.protocols").get<std::vector<int>>();
  if (rc.protocols.empty()) fail("experiment.protocols", "at least one protocol is needed");
  for (int p : rc.protocols) guarded("experiment.protocols", [&] { check_protocol(p); });
  rc.sweep_depths = get("experiment.sweep_depths").get<std::vector<double>>();
  for (double d : rc.sweep_depths) {
    if (!(d >= 0 && d <= 1)) fail("experiment.sweep_depths", "depths must be in [0, 1]");
  }

  if (get("grid.shipped").get<bool>()) rc.grid = default_vectorizer_grid();
  for (const auto& k : ConfigDocument::keys()) {
    if (k.rfind("grid.", 0) != 0 || schema().at(k).kind != Kind::Grid || get(k).is_null()) continue;
    rc.grid[k.substr(5)] = get(k).get<std::vector<json>>();
  }
  rc.grid_folds = get("grid.folds").is_null() ? rc.folds : get("grid.folds").get<std::size_t>();
  if (rc.grid_folds < 2) fail("grid.folds", "folds must be at least 2");
  guarded("grid.metric", [&] { rc.grid_metric = parse_metric(get("grid.metric").get<std::string>()); });
  for (int l : get("grid.layers").get<std::vector<int>>()) {
    if (l < 1 || static_cast<std::size_t>(l) > layer_count(rc.cascade.architecture)) {
      fail("grid.layers", "layer " + std::to_string(l) + " does not exist in a " +
                              std::string(architecture_name(rc.cascade.architecture)) + "-layer cascade");
    }
    rc.grid_layers.push_back(static_cast<std::size_t>(l));
  }

  rc.model = path_or("classify.model", rc.out / "model");
  if (!get("classify.input").is_null()) rc.classify_input = fs::path(get("classify.input").get<std::string>());
  rc.classify_filter = get("classify.filter").get<bool>();
  const auto& cd = get("classify.depth");
  if (cd.is_string()) fail("classify.depth", "classification needs a numeric depth");
  if (cd.is_number()) {
    rc.classify_depth = cd.get<double>();
    if (!(*rc.classify_depth >= 0 && *rc.classify_depth <= 1)) fail("classify.depth", "depth must be in [0, 1]");
  }
  return rc;
}

}  // namespace oppscreen
