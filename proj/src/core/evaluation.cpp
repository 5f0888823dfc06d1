#include "core/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "core/corpus.hpp"
#include "core/error.hpp"
#include "core/random.hpp"

namespace oppscreen {

using nlohmann::json;

namespace {

std::string percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

std::vector<LabeledId> labeled_ids(std::span<const EmotionLabel> labels) {
  std::vector<LabeledId> ids;
  ids.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) ids.push_back({static_cast<std::int64_t>(i), labels[i]});
  return ids;
}

struct Subset {
  std::vector<ProcessedTweet> tweets;
  std::vector<EmotionLabel> labels;
};

json mean_row(const ExperimentReport& r) {
  return {{"protocol", r.protocol},
          {"classifier", r.algorithm},
          {"features", r.feature_set},
          {"precision", optional_json(r.mean.precision)},
          {"tau1", optional_json(r.mean.tau1)},
          {"tau2", optional_json(r.mean.tau2)}};
}

}  // namespace

Architecture protocol_architecture(int protocol) {
  check_protocol(protocol);
  switch (protocol) {
    case 1: return Architecture::Single;
    case 2:
    case 3: return Architecture::Two;
    default: return Architecture::Three;
  }
}

bool protocol_uses_depth(int protocol) {
  check_protocol(protocol);
  return protocol >= 3;
}

void check_protocol(int protocol) {
  if (protocol < 1 || protocol > 4) {
    throw Error(ErrorKind::InvalidArgument, "protocol must be 1, 2, 3 or 4 (got " + std::to_string(protocol) + ")");
  }
}

double select_depth(std::span<const ProcessedTweet> tweets, std::span<const EmotionLabel> labels,
                    const ExperimentConfig& cfg, std::size_t fold, const SentimentLexicons& lex) {
  cfg.depth.validate();
  const auto ids = labeled_ids(labels);
  const auto inner = stratified_folds(ids, cfg.depth.inner_folds, derive_seed(cfg.seed, fold, 0x64657074));
  Subset fit, hold;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    Subset& s = inner.assignment.at(static_cast<std::int64_t>(i)) == 0 ? hold : fit;
    s.tweets.push_back(tweets[i]);
    s.labels.push_back(labels[i]);
  }
  CascadeConfig cc = cfg.cascade;
  cc.architecture = protocol_architecture(cfg.protocol);
  cc.seed = derive_seed(cfg.seed, fold, 0x696e6e);
  const auto model = train_cascade(fit.tweets, fit.labels, cc, lex);
  const auto points = sweep_depth(model, hold.tweets, hold.labels, cfg.depth.candidates, lex);

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& r = points[i].report;
    if (!r.precision || !r.coverage || *r.coverage < cfg.depth.coverage_target) continue;
    if (!best || *r.precision > *points[*best].report.precision) best = i;
  }
  if (!best) {
    // nothing reaches the coverage target: lowest candidate
    return *std::min_element(cfg.depth.candidates.begin(), cfg.depth.candidates.end());
  }
  return points[*best].depth;
}

void DepthPolicy::validate() const {
  if (!(fixed >= 0 && fixed <= 1)) throw Error(ErrorKind::InvalidArgument, "depth must be in [0, 1]");
  if (!(coverage_target >= 0 && coverage_target <= 1)) {
    throw Error(ErrorKind::InvalidArgument, "coverage target must be in [0, 1]");
  }
  if (automatic && candidates.empty()) throw Error(ErrorKind::InvalidArgument, "no candidate depths");
  for (double d : candidates) {
    if (!(d >= 0 && d <= 1)) throw Error(ErrorKind::InvalidArgument, "candidate depths must be in [0, 1]");
  }
  if (inner_folds < 2) throw Error(ErrorKind::InvalidArgument, "inner_folds must be at least 2");
}

void ExperimentConfig::validate() const {
  check_protocol(protocol);
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "folds must be at least 2");
  depth.validate();
  for (double d : sweep_depths) {
    if (!(d >= 0 && d <= 1)) throw Error(ErrorKind::InvalidArgument, "sweep depths must be in [0, 1]");
  }
  CascadeConfig cc = cascade;
  cc.architecture = protocol_architecture(protocol);
  cc.depth = 0;
  cc.validate();
}

json MeanMetrics::to_json() const {
  return {{"precision", optional_json(precision)},
          {"tau1", optional_json(tau1)},
          {"tau2", optional_json(tau2)},
          {"coverage", optional_json(coverage)},
          {"defined_folds", defined_folds}};
}

MeanMetrics MeanMetrics::from_json(const json& j) {
  MeanMetrics m;
  m.precision = optional_from_json(j.at("precision"));
  m.tau1 = optional_from_json(j.at("tau1"));
  m.tau2 = optional_from_json(j.at("tau2"));
  m.coverage = optional_from_json(j.at("coverage"));
  m.defined_folds = j.at("defined_folds").get<std::size_t>();
  return m;
}

MeanMetrics mean_metrics(std::span<const ToleranceReport> reports) {
  MeanMetrics m;
  auto avg = [&](auto field) -> std::optional<double> {
    double s = 0;
    std::size_t n = 0;
    for (const auto& r : reports) {
      if (const auto& v = r.*field) {
        s += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return s / static_cast<double>(n);
  };
  m.precision = avg(&ToleranceReport::precision);
  m.tau1 = avg(&ToleranceReport::tau1);
  m.tau2 = avg(&ToleranceReport::tau2);
  m.coverage = avg(&ToleranceReport::coverage);
  m.defined_folds = static_cast<std::size_t>(
      std::count_if(reports.begin(), reports.end(), [](const ToleranceReport& r) { return r.precision.has_value(); }));
  return m;
}

ExperimentReport run_numerical_test(std::span<const ProcessedTweet> tweets, std::span<const EmotionLabel> labels,
                                    const ExperimentConfig& cfg, const SentimentLexicons& lex) {
  cfg.validate();
  if (tweets.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "tweets and labels differ in count");

  ExperimentReport rep;
  rep.protocol = cfg.protocol;
  rep.algorithm = std::string(algorithm_name(cfg.cascade.train[0].algorithm));
  rep.feature_set = cfg.cascade.features[0].use_dense ? "all" : "basic";
  rep.folds = cfg.folds;
  rep.seed = cfg.seed;
  rep.automatic_depth = protocol_uses_depth(cfg.protocol) && cfg.depth.automatic;
  rep.sweep_depths = cfg.sweep_depths;

  const auto ids = labeled_ids(labels);
  const FoldAssignment split = stratified_folds(ids, cfg.folds, cfg.seed);
  std::vector<std::pair<ProcessedTweet, EmotionLabel>> flagged;

  for (std::size_t f = 0; f < cfg.folds; ++f) {
    Subset train, test;
    for (std::size_t i = 0; i < tweets.size(); ++i) {
      Subset& s = split.assignment.at(static_cast<std::int64_t>(i)) == f ? test : train;
      s.tweets.push_back(tweets[i]);
      s.labels.push_back(labels[i]);
    }
    FoldResult fr;
    fr.fold = f + 1;
    fr.train_size = train.tweets.size();
    fr.test_size = test.tweets.size();
    try {
      CascadeConfig cc = cfg.cascade;
      cc.architecture = protocol_architecture(cfg.protocol);
      cc.seed = derive_seed(cfg.seed, f + 1);
      if (!protocol_uses_depth(cfg.protocol)) {
        cc.depth = 0.0;
      } else if (cfg.depth.automatic) {
        cc.depth = select_depth(train.tweets, train.labels, cfg, f + 1, lex);
      } else {
        cc.depth = cfg.depth.fixed;
      }
      fr.depth = cc.depth;
      const auto model = train_cascade(train.tweets, train.labels, cc, lex);

      std::vector<double> depths{cc.depth};
      depths.insert(depths.end(), cfg.sweep_depths.begin(), cfg.sweep_depths.end());
      auto points = sweep_depth(model, test.tweets, test.labels, depths, lex);
      fr.report = points[0].report;
      for (std::size_t i = 0; i < points[0].flagged.size(); ++i) {
        flagged.emplace_back(test.tweets[points[0].flagged[i]], EmotionLabel::Opportunity);
      }
      for (std::size_t i = 1; i < points.size(); ++i) fr.sweep.push_back(points[i].report);
    } catch (const Error& e) {
      throw Error(e.kind(), "fold " + std::to_string(f + 1) + ": " + e.what());
    }
    rep.per_fold.push_back(std::move(fr));
  }

  std::vector<ToleranceReport> reports;
  ConfusionMatrix4 pooled;
  double depth_sum = 0;
  for (const auto& fr : rep.per_fold) {
    reports.push_back(fr.report);
    pooled += fr.report.matrix;
    depth_sum += fr.depth;
  }
  rep.mean = mean_metrics(reports);
  rep.micro = tolerances(pooled);
  rep.mean_depth = depth_sum / static_cast<double>(rep.per_fold.size());
  for (std::size_t d = 0; d < cfg.sweep_depths.size(); ++d) {
    std::vector<ToleranceReport> at;
    for (const auto& fr : rep.per_fold) at.push_back(fr.sweep[d]);
    rep.sweep.push_back(mean_metrics(at));
  }
  rep.tickers = ticker_histogram(flagged);
  return rep;
}

json ExperimentReport::to_json() const {
  json folds_json = json::array();
  for (const auto& f : per_fold) {
    folds_json.push_back({{"fold", f.fold},
                          {"train_size", f.train_size},
                          {"test_size", f.test_size},
                          {"depth", f.depth},
                          {"metrics", f.report.to_json()}});
  }
  json sweep_json = json::array();
  for (std::size_t i = 0; i < sweep_depths.size(); ++i) {
    json row = sweep[i].to_json();
    row["depth"] = sweep_depths[i];
    sweep_json.push_back(row);
  }
  return {{"format", "oppscreen.experiment"},
          {"version", 1},
          {"protocol", protocol},
          {"architecture", architecture_name(protocol_architecture(protocol))},
          {"classifier", algorithm},
          {"features", feature_set},
          {"folds", folds},
          {"seed", seed},
          {"depth", {{"uses_depth", protocol_uses_depth(protocol)},
                     {"automatic", automatic_depth},
                     {"mean", mean_depth}}},
          {"mean", mean.to_json()},
          {"micro", micro.to_json()},
          {"per_fold", folds_json},
          {"depth_sweep", sweep_json},
          {"tickers", tickers.to_json()}};
}

ExperimentReport ExperimentReport::from_json(const json& j) {
  if (j.value("format", std::string()) != "oppscreen.experiment") {
    throw Error(ErrorKind::Parse, "not an experiment report");
  }
  if (j.value("version", -1) != 1) {
    throw Error(ErrorKind::Version, "experiment report version " + j.value("version", json(-1)).dump() + " is not supported");
  }
  try {
    ExperimentReport r;
    r.protocol = j.at("protocol").get<int>();
    check_protocol(r.protocol);
    r.algorithm = j.at("classifier").get<std::string>();
    r.feature_set = j.at("features").get<std::string>();
    r.folds = j.at("folds").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.automatic_depth = j.at("depth").at("automatic").get<bool>();
    r.mean_depth = j.at("depth").at("mean").get<double>();
    r.mean = MeanMetrics::from_json(j.at("mean"));
    r.micro = ToleranceReport::from_json(j.at("micro"));
    for (const auto& f : j.at("per_fold")) {
      FoldResult fr;
      fr.fold = f.at("fold").get<std::size_t>();
      fr.train_size = f.at("train_size").get<std::size_t>();
      fr.test_size = f.at("test_size").get<std::size_t>();
      fr.depth = f.at("depth").get<double>();
      fr.report = ToleranceReport::from_json(f.at("metrics"));
      r.per_fold.push_back(std::move(fr));
    }
    for (const auto& row : j.at("depth_sweep")) {
      r.sweep_depths.push_back(row.at("depth").get<double>());
      r.sweep.push_back(MeanMetrics::from_json(row));
    }
    r.tickers = TickerHistogram::from_json(j.at("tickers"));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed experiment report: ") + e.what());
  }
}

std::string ExperimentReport::to_text() const {
  const std::vector<std::string> head{"Classifier", "Features", "Precision", "tau1", "tau2", "Depth", "Coverage"};
  std::vector<std::string> row{algorithm,
                               feature_set,
                               percent(mean.precision),
                               percent(mean.tau1),
                               percent(mean.tau2),
                               protocol_uses_depth(protocol) ? fixed(mean_depth * 100.0, 0) + "%" : "-",
                               percent(mean.coverage)};
  std::string out = "Numerical test " + std::to_string(protocol) + " (" +
                    std::string(architecture_name(protocol_architecture(protocol))) + " layer, " +
                    std::to_string(folds) + "-fold, macro mean)\n";
  for (std::size_t i = 0; i < head.size(); ++i) out += pad(head[i], 12);
  out += "\n";
  for (std::size_t i = 0; i < row.size(); ++i) out += pad(row[i], 12);
  out += "\n\nper fold:\n";
  out += pad("fold", 6) + pad("depth", 8) + pad("precision", 11) + pad("tau1", 9) + pad("tau2", 9) + "coverage\n";
  for (const auto& f : per_fold) {
    out += pad(std::to_string(f.fold), 6) + pad(fixed(f.depth, 2), 8) + pad(percent(f.report.precision), 11) +
           pad(percent(f.report.tau1), 9) + pad(percent(f.report.tau2), 9) + percent(f.report.coverage) + "\n";
  }
  out += "\npooled: precision " + percent(micro.precision) + ", tau1 " + percent(micro.tau1) + ", tau2 " +
         percent(micro.tau2) + ", coverage " + percent(micro.coverage) + "\n";
  if (!tickers.upper_quartile.empty()) {
    out += "upper-quartile tickers:";
    for (const auto& t : tickers.upper_quartile) out += " " + t;
    out += "\n";
  }
  return out;
}

std::string ExperimentReport::sweep_csv() const {
  std::string out = "depth,precision,tau1,tau2,coverage,defined_folds\n";
  auto cell = [](const std::optional<double>& v) { return v ? fixed(*v, 6) : std::string("n/a"); };
  for (std::size_t i = 0; i < sweep_depths.size(); ++i) {
    const auto& m = sweep[i];
    out += fixed(sweep_depths[i], 2) + "," + cell(m.precision) + "," + cell(m.tau1) + "," + cell(m.tau2) + "," +
           cell(m.coverage) + "," + std::to_string(m.defined_folds) + "\n";
  }
  return out;
}

json delta_table(const ExperimentReport& a, const ExperimentReport& b) {
  auto diff = [](const std::optional<double>& x, const std::optional<double>& y) {
    return x && y ? json(*y - *x) : json("n/a");
  };
  return {{"from", mean_row(a)},
          {"to", mean_row(b)},
          {"delta", {{"precision", diff(a.mean.precision, b.mean.precision)},
                     {"tau1", diff(a.mean.tau1, b.mean.tau1)},
                     {"tau2", diff(a.mean.tau2, b.mean.tau2)}}}};
}

std::string delta_text(const ExperimentReport& a, const ExperimentReport& b) {
  auto diff = [](const std::optional<double>& x, const std::optional<double>& y) {
    if (!x || !y) return std::string("n/a");
    const double d = (*y - *x) * 100.0;
    return (d >= 0 ? "+" : "") + fixed(d, 2);
  };
  std::string out = "Improvement from test " + std::to_string(a.protocol) + " to test " + std::to_string(b.protocol) + "\n";
  out += pad("Classifier", 12) + pad("Features", 10) + pad("Precision", 11) + pad("tau1", 9) + "tau2\n";
  out += pad(b.algorithm, 12) + pad(b.feature_set, 10) + pad(diff(a.mean.precision, b.mean.precision), 11) +
         pad(diff(a.mean.tau1, b.mean.tau1), 9) + diff(a.mean.tau2, b.mean.tau2) + "\n";
  return out;
}

}  // namespace oppscreen
