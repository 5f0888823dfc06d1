#include "app/commands.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "core/cascade.hpp"
#include "core/error.hpp"
#include "core/evaluation.hpp"
#include "core/io.hpp"
#include "core/processed.hpp"
#include "core/random.hpp"
#include "core/text.hpp"

namespace oppscreen {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) throw Error(ErrorKind::InvalidArgument, what + " is not set");
  std::error_code ec;
  if (!fs::exists(p, ec)) throw Error(ErrorKind::Io, what + ": " + p.string() + " does not exist");
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

void write_out(const fs::path& path, std::string_view content) {
  ensure_dir(path.parent_path());
  io::write_file_atomic(path, content);
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

SentimentLexicons load_lexicons(const RunConfig& cfg) {
  require_file(cfg.polarity, "resources.polarity");
  require_file(cfg.emotion, "resources.emotion");
  require_file(cfg.emoji, "resources.emoji");
  require_file(cfg.adverbs, "resources.adverbs");
  return SentimentLexicons::load(cfg.polarity, cfg.emotion, cfg.emoji, cfg.adverbs);
}

PreprocessResources load_resources(const RunConfig& cfg) {
  const auto& p = cfg.preprocess_paths;
  require_file(p.lexicon, "resources.lexicon");
  require_file(p.lemmas, "resources.lemmas");
  require_file(p.stopwords, "resources.stopwords");
  require_file(p.keepwords, "resources.keepwords");
  if (!p.spam.empty()) require_file(p.spam, "resources.spam");
  if (!p.index_hashtags.empty()) require_file(p.index_hashtags, "resources.index_hashtags");
  auto res = load_preprocess_resources(p, cfg.filter);
  res.max_edit = cfg.max_edit;
  return res;
}

std::vector<AnnotatedTweet> load_raw(const fs::path& path, const std::optional<DatasetFormat>& format,
                                     bool require_labels) {
  require_file(path, "dataset");
  return load_dataset(path, format.value_or(format_for_path(path)), require_labels);
}

ProcessedTweet process_one(const AnnotatedTweet& t, const PreprocessResources& res) {
  try {
    return preprocess_pipeline(t, res);
  } catch (const Error& e) {
    throw Error(e.kind(), "tweet " + std::to_string(t.id) + ": " + e.what());
  }
}

struct Labeled {
  std::vector<ProcessedTweet> tweets;
  std::vector<EmotionLabel> labels;
};

Labeled load_labeled(const RunConfig& cfg) {
  require_file(cfg.processed, "dataset.processed");
  Labeled d;
  const auto rows = load_processed(cfg.processed);
  try {
    split_labeled(rows, d.tweets, d.labels);
  } catch (const Error& e) {
    throw Error(e.kind(), cfg.processed.string() + ": " + e.what());
  }
  if (d.tweets.empty()) throw Error(ErrorKind::Data, cfg.processed.string() + ": no tweets");
  return d;
}

json class_counts(std::span<const EmotionLabel> labels) {
  json j = json::object();
  for (auto l : kAllLabels) {
    j[std::string(label_symbol(l))] = std::count(labels.begin(), labels.end(), l);
  }
  return j;
}

int protocol_for(Architecture a) {
  switch (a) {
    case Architecture::Single: return 1;
    case Architecture::Two: return 3;
    case Architecture::Three: return 4;
  }
  return 4;
}

// Processed JSONL rows carry "tokens"; raw dataset rows carry "text".
bool looks_processed(const fs::path& path) {
  if (format_for_path(path) == DatasetFormat::Csv) return false;
  const std::string content = io::read_file(path);
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    const std::string line = text::trim(std::string_view(content).substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    return j.is_object() && j.contains("tokens") && !j.contains("text");
  }
  return false;
}

}  // namespace

json run_preprocess(const RunConfig& cfg) {
  if (!cfg.dataset) throw Error(ErrorKind::InvalidArgument, "dataset.path is not set");
  const auto raw = load_raw(*cfg.dataset, cfg.format, false);
  const auto res = load_resources(cfg);

  std::vector<LabeledTweet> kept;
  std::vector<json> discards;
  std::map<std::string, std::size_t> reasons;
  for (const auto& t : raw) {
    const auto d = filter_relevant(t, res.filter, res.lexicon, res.index_hashtags);
    if (!d.keep) {
      discards.push_back({{"id", t.id}, {"reason", discard_reason_name(d.reason)}});
      ++reasons[std::string(discard_reason_name(d.reason))];
      continue;
    }
    LabeledTweet row;
    row.tweet = process_one(t, res);
    if (t.labeled) row.emotion = t.emotion;
    kept.push_back(std::move(row));
  }

  std::vector<ProcessedTweet> tweets;
  for (const auto& r : kept) tweets.push_back(r.tweet);
  const auto dedup = deduplicate(tweets, res.filter.jaccard_threshold);
  const std::set<std::int64_t> survivors(dedup.survivors.begin(), dedup.survivors.end());
  for (const auto& [survivor, dropped] : dedup.groups) {
    for (auto id : dropped) {
      discards.push_back({{"id", id},
                          {"reason", discard_reason_name(DiscardReason::Duplicate)},
                          {"duplicate_of", survivor}});
      ++reasons[std::string(discard_reason_name(DiscardReason::Duplicate))];
    }
  }
  std::vector<LabeledTweet> out;
  std::vector<EmotionLabel> labels;
  std::size_t unlabeled = 0;
  for (auto& r : kept) {
    if (!survivors.count(r.tweet.id)) continue;
    if (r.emotion) labels.push_back(*r.emotion);
    else ++unlabeled;
    out.push_back(std::move(r));
  }
  std::stable_sort(discards.begin(), discards.end(),
                   [](const json& a, const json& b) { return a.at("id").get<std::int64_t>() < b.at("id").get<std::int64_t>(); });

  write_out(cfg.processed, format_processed(out));
  std::string log;
  for (const auto& d : discards) log += d.dump() + "\n";
  const fs::path log_path = cfg.out / "discards.jsonl";
  write_out(log_path, log);

  json summary{{"command", "preprocess"},
               {"input", raw.size()},
               {"kept", out.size()},
               {"discarded", discards.size()},
               {"reasons", reasons},
               {"classes", class_counts(labels)},
               {"unlabeled", unlabeled},
               {"processed", cfg.processed.string()},
               {"discard_log", log_path.string()}};
  summary["text"] = "kept " + std::to_string(out.size()) + " of " + std::to_string(raw.size()) + " tweets -> " +
                    cfg.processed.string() + "\n" + "discard log: " + log_path.string() + "\n";
  return summary;
}

json run_grid_search(const RunConfig& cfg) {
  const auto data = load_labeled(cfg);
  const auto lex = load_lexicons(cfg);
  if (cfg.grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty grid (grid.shipped = false and no grid.* keys)");
  const auto specs = layer_specs(cfg.cascade.architecture);
  std::vector<std::size_t> layers = cfg.grid_layers;
  if (layers.empty()) {
    for (std::size_t i = 1; i <= specs.size(); ++i) layers.push_back(i);
  }

  json results = json::array();
  std::string text;
  for (std::size_t l : layers) {
    const auto& spec = specs[l - 1];
    std::vector<ProcessedTweet> sub;
    std::vector<int> y;
    for (std::size_t i = 0; i < data.tweets.size(); ++i) {
      if (!spec.members.empty() && std::find(spec.members.begin(), spec.members.end(), data.labels[i]) == spec.members.end()) {
        continue;
      }
      sub.push_back(data.tweets[i]);
      y.push_back(std::find(spec.positive.begin(), spec.positive.end(), data.labels[i]) != spec.positive.end());
    }
    TrainConfig tc = cfg.cascade.train[l - 1];
    tc.seed = derive_seed(cfg.seed, l);
    GridSearchResult r;
    try {
      r = grid_search(sub, y, cfg.cascade.features[l - 1], tc, cfg.grid, cfg.grid_folds, cfg.grid_metric, lex);
    } catch (const Error& e) {
      throw Error(e.kind(), "layer " + std::to_string(l) + ": " + e.what());
    }
    json cells = json::array();
    for (const auto& [cell, scores] : r.cells) {
      double mean = 0;
      for (double s : scores) mean += s;
      cells.push_back({{"cell", cell}, {"scores", scores}, {"mean", mean / static_cast<double>(scores.size())}});
    }
    results.push_back({{"layer", l},
                       {"samples", sub.size()},
                       {"best", r.best},
                       {"best_score", r.best_score},
                       {"cells", cells}});
    text += "layer " + std::to_string(l) + ": best " + r.best.dump() + " " + std::string(metric_name(cfg.grid_metric)) +
            " " + json(r.best_score).dump() + "\n";
  }
  const fs::path path = cfg.out / "grid-search.json";
  write_out(path, pretty({{"format", "oppscreen.grid"},
                          {"version", 1},
                          {"metric", metric_name(cfg.grid_metric)},
                          {"folds", cfg.grid_folds},
                          {"seed", cfg.seed},
                          {"layers", results}}));
  json summary{{"command", "grid-search"}, {"output", path.string()}};
  json best = json::array();
  for (const auto& r : results) best.push_back({{"layer", r["layer"]}, {"best", r["best"]}, {"best_score", r["best_score"]}});
  summary["best"] = best;
  summary["text"] = text + "written to " + path.string() + "\n";
  return summary;
}

json run_train(const RunConfig& cfg) {
  const auto data = load_labeled(cfg);
  const auto lex = load_lexicons(cfg);
  CascadeConfig cc = cfg.cascade;
  cc.seed = cfg.seed;
  if (cfg.depth.automatic) {
    const auto e = cfg.experiment(protocol_for(cc.architecture));
    cc.depth = select_depth(data.tweets, data.labels, e, 0, lex);
  } else {
    cc.depth = cfg.depth.fixed;
  }
  const auto model = train_cascade(data.tweets, data.labels, cc, lex);
  model.save(cfg.model);

  json layers = json::array();
  for (const auto& l : model.layers()) {
    layers.push_back({{"algorithm", algorithm_name(l.model->algorithm())},
                      {"width", l.features.width()},
                      {"retained_grams", l.features.mask.retained.size()}});
  }
  json summary{{"command", "train"},
               {"model", cfg.model.string()},
               {"architecture", architecture_name(model.architecture())},
               {"depth", model.depth()},
               {"automatic_depth", cfg.depth.automatic},
               {"samples", data.tweets.size()},
               {"classes", class_counts(data.labels)},
               {"layers", layers}};
  summary["text"] = "trained " + std::string(architecture_name(model.architecture())) + "-layer cascade on " +
                    std::to_string(data.tweets.size()) + " tweets, depth " + json(model.depth()).dump() + " -> " +
                    cfg.model.string() + "\n";
  return summary;
}

json run_experiment(const RunConfig& cfg, std::vector<int> protocols) {
  if (protocols.empty()) protocols = cfg.protocols;
  for (int p : protocols) check_protocol(p);
  const auto data = load_labeled(cfg);
  const auto lex = load_lexicons(cfg);

  std::vector<ExperimentReport> reports;
  json runs = json::array();
  std::string text;
  for (int p : protocols) {
    const auto rep = run_numerical_test(data.tweets, data.labels, cfg.experiment(p), lex);
    const std::string stem = "experiment-p" + std::to_string(p);
    write_out(cfg.out / (stem + ".json"), pretty(rep.to_json()));
    write_out(cfg.out / (stem + ".txt"), rep.to_text());
    json run{{"protocol", p},
             {"json", (cfg.out / (stem + ".json")).string()},
             {"text", (cfg.out / (stem + ".txt")).string()},
             {"mean", rep.mean.to_json()},
             {"mean_depth", rep.mean_depth}};
    if (protocol_uses_depth(p)) {
      const fs::path csv = cfg.out / ("depth-sweep-p" + std::to_string(p) + ".csv");
      write_out(csv, rep.sweep_csv());
      run["sweep"] = csv.string();
    }
    runs.push_back(run);
    text += rep.to_text() + "\n";
    reports.push_back(rep);
  }
  json deltas = json::array();
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const auto& a = reports.front();
    const auto& b = reports[i];
    const std::string stem = "delta-p" + std::to_string(a.protocol) + "-p" + std::to_string(b.protocol);
    const json d = delta_table(a, b);
    write_out(cfg.out / (stem + ".json"), pretty(d));
    write_out(cfg.out / (stem + ".txt"), delta_text(a, b));
    deltas.push_back({{"from", a.protocol}, {"to", b.protocol}, {"json", (cfg.out / (stem + ".json")).string()}});
    text += delta_text(a, b) + "\n";
  }
  return {{"command", "experiment"}, {"runs", runs}, {"deltas", deltas}, {"text", text}};
}

json run_classify(const RunConfig& cfg) {
  if (!cfg.classify_input) throw Error(ErrorKind::InvalidArgument, "classify.input is not set");
  require_file(*cfg.classify_input, "classify.input");
  require_file(cfg.model / "cascade.json", "classify.model");
  auto model = CascadeModel::load(cfg.model);
  if (cfg.classify_depth) model.set_depth(*cfg.classify_depth);
  const auto lex = load_lexicons(cfg);

  std::vector<ProcessedTweet> tweets;
  std::size_t skipped = 0;
  if (looks_processed(*cfg.classify_input)) {
    for (auto& r : load_processed(*cfg.classify_input)) tweets.push_back(std::move(r.tweet));
  } else {
    const auto raw = load_raw(*cfg.classify_input, cfg.format, false);
    const auto res = load_resources(cfg);
    for (const auto& t : raw) {
      if (cfg.classify_filter && !filter_relevant(t, res.filter, res.lexicon, res.index_hashtags).keep) {
        ++skipped;
        continue;
      }
      tweets.push_back(process_one(t, res));
    }
  }

  struct Row {
    std::size_t index;
    CascadeDecision decision;
  };
  std::vector<Row> rows;
  std::vector<std::pair<ProcessedTweet, EmotionLabel>> predicted;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    rows.push_back({i, model.classify(tweets[i], lex)});
    predicted.emplace_back(tweets[i], rows.back().decision.label);
  }
  // P+ first by final-layer confidence, the rest in input order
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    const bool pa = a.decision.label == EmotionLabel::Opportunity;
    const bool pb = b.decision.label == EmotionLabel::Opportunity;
    if (pa != pb) return pa;
    if (!pa) return false;
    return a.decision.confidence.back() > b.decision.confidence.back();
  });

  std::string out;
  std::size_t flagged = 0;
  for (const auto& r : rows) {
    const auto& d = r.decision;
    if (d.label == EmotionLabel::Opportunity) ++flagged;
    json row{{"id", tweets[r.index].id},
             {"label", label_symbol(d.label)},
             {"confidences", d.confidence},
             {"abstained", d.abstained},
             {"tickers", tweets[r.index].tickers}};
    if (d.abstained) row["abstained_layer"] = d.abstained_layer;
    out += row.dump() + "\n";
  }
  const auto hist = ticker_histogram(predicted);
  const fs::path rows_path = cfg.out / "classified.jsonl";
  write_out(rows_path, out);
  write_out(cfg.out / "tickers.json", pretty(hist.to_json()));
  write_out(cfg.out / "tickers.csv", hist.to_csv());

  std::string text = "classified " + std::to_string(tweets.size()) + " tweets at depth " + json(model.depth()).dump() +
                     ", flagged " + std::to_string(flagged) + " as P+";
  if (skipped) text += " (" + std::to_string(skipped) + " filtered out)";
  text += " -> " + rows_path.string() + "\n";
  if (!hist.upper_quartile.empty()) {
    text += "upper-quartile tickers:";
    for (const auto& t : hist.upper_quartile) text += " " + t;
    text += "\n";
  }
  return {{"command", "classify"},
          {"classified", tweets.size()},
          {"flagged", flagged},
          {"filtered", skipped},
          {"depth", model.depth()},
          {"output", rows_path.string()},
          {"upper_quartile", hist.upper_quartile},
          {"text", text}};
}

json run_report(const RunConfig& cfg, std::vector<fs::path> inputs) {
  if (inputs.empty()) {
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(cfg.out, ec)) {
      const std::string name = e.path().filename().string();
      if (name.rfind("experiment-p", 0) == 0 && e.path().extension() == ".json") inputs.push_back(e.path());
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) throw Error(ErrorKind::Io, "no experiment reports in " + cfg.out.string());
  }
  std::vector<ExperimentReport> reports;
  for (const auto& p : inputs) {
    require_file(p, "report input");
    try {
      reports.push_back(ExperimentReport::from_json(json::parse(io::read_file(p))));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse, p.string() + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), p.string() + ": " + e.what());
    }
  }

  std::string text;
  json coverage = json::array();
  for (const auto& r : reports) {
    text += r.to_text();
    const bool met = r.mean.coverage && *r.mean.coverage >= cfg.depth.coverage_target;
    text += "coverage target " + json(cfg.depth.coverage_target).dump() + ": " + (met ? "met" : "not met") + "\n";
    const auto ranked = r.tickers.ranked();
    if (!ranked.empty()) {
      text += "most flagged tickers:";
      for (std::size_t i = 0; i < ranked.size() && i < 10; ++i) {
        text += " " + ranked[i].first + "(" + std::to_string(ranked[i].second) + ")";
      }
      text += "\n";
    }
    text += "\n";
    coverage.push_back({{"protocol", r.protocol}, {"coverage", optional_json(r.mean.coverage)}, {"target_met", met}});
  }
  for (std::size_t i = 1; i < reports.size(); ++i) text += delta_text(reports.front(), reports[i]) + "\n";
  const fs::path path = cfg.out / "report.txt";
  write_out(path, text);
  return {{"command", "report"}, {"output", path.string()}, {"coverage", coverage}, {"text", text}};
}

}  // namespace oppscreen
