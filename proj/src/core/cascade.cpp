#include "core/cascade.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/random.hpp"

namespace oppscreen {

using nlohmann::json;

namespace {

bool contains(const std::vector<EmotionLabel>& v, EmotionLabel l) {
  return std::find(v.begin(), v.end(), l) != v.end();
}

std::string symbols(const std::vector<EmotionLabel>& v) {
  std::string s;
  for (EmotionLabel l : v) s += (s.empty() ? "" : ", ") + std::string(label_symbol(l));
  return s;
}

json labels_json(const std::vector<EmotionLabel>& v) {
  json a = json::array();
  for (EmotionLabel l : v) a.push_back(label_symbol(l));
  return a;
}

std::vector<EmotionLabel> labels_from_json(const json& j) {
  std::vector<EmotionLabel> v;
  for (const auto& s : j) {
    const auto l = parse_label(s.get<std::string>());
    if (!l) throw Error(ErrorKind::Parse, "unknown label in cascade bundle");
    v.push_back(*l);
  }
  return v;
}

json read_json(const std::filesystem::path& p) {
  try {
    return json::parse(io::read_file(p));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, p.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& p, const json& j) { io::write_file_atomic(p, j.dump() + "\n"); }

void check_depth(double d) {
  if (!(d >= 0.0 && d <= 1.0)) throw Error(ErrorKind::InvalidArgument, "depth must be in [0, 1]");
}

}  // namespace

std::string_view architecture_name(Architecture a) {
  switch (a) {
    case Architecture::Single: return "single";
    case Architecture::Two: return "two";
    case Architecture::Three: return "three";
  }
  return "?";
}

Architecture parse_architecture(std::string_view s) {
  if (s == "single" || s == "1") return Architecture::Single;
  if (s == "two" || s == "2") return Architecture::Two;
  if (s == "three" || s == "3") return Architecture::Three;
  throw Error(ErrorKind::InvalidArgument, "unknown architecture '" + std::string(s) + "'");
}

std::size_t layer_count(Architecture a) { return static_cast<std::size_t>(a); }

std::vector<LayerSpec> layer_specs(Architecture a) {
  using L = EmotionLabel;
  const LayerSpec neutral_gate{{}, {L::PositiveStatement, L::Opportunity, L::NegativeAwareness}, {L::Neutral, std::nullopt}};
  switch (a) {
    case Architecture::Single:
      // "rest" is reported as N
      return {{{}, {L::Opportunity}, {L::Neutral, L::Opportunity}}};
    case Architecture::Two:
      return {neutral_gate,
              {{L::PositiveStatement, L::Opportunity, L::NegativeAwareness}, {L::Opportunity}, {L::Neutral, L::Opportunity}}};
    case Architecture::Three:
      return {neutral_gate,
              {{L::PositiveStatement, L::Opportunity, L::NegativeAwareness},
               {L::PositiveStatement, L::Opportunity},
               {L::NegativeAwareness, std::nullopt}},
              {{L::PositiveStatement, L::Opportunity}, {L::Opportunity}, {L::PositiveStatement, L::Opportunity}}};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown architecture");
}

void CascadeConfig::validate() const {
  check_depth(depth);
  for (std::size_t i = 0; i < layer_count(architecture); ++i) {
    try {
      train[i].validate();
      features[i].validate();
    } catch (const Error& e) {
      throw Error(e.kind(), "layer " + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

CascadeDecision decide(std::span<const LayerSpec> specs, std::span<const std::array<double, 2>> probabilities,
                       double depth) {
  CascadeDecision d;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (i >= probabilities.size()) throw Error(ErrorKind::InvalidArgument, "missing layer probabilities");
    const auto& p = probabilities[i];
    const int k = p[1] > p[0] ? 1 : 0;
    d.confidence.push_back(p[k]);
    if (!(p[k] > depth)) {
      d.label = EmotionLabel::Neutral;
      d.abstained = true;
      d.abstained_layer = i + 1;
      return d;
    }
    if (specs[i].outcome[k]) {
      d.label = *specs[i].outcome[k];
      return d;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "cascade ends without a terminal outcome");
}

void CascadeModel::set_depth(double depth) {
  check_depth(depth);
  depth_ = depth;
}

std::vector<LayerSpec> CascadeModel::specs() const {
  std::vector<LayerSpec> s;
  for (const auto& l : layers_) s.push_back(l.spec);
  return s;
}

std::vector<std::array<double, 2>> CascadeModel::layer_probabilities(const ProcessedTweet& tweet,
                                                                     const SentimentLexicons& lex) const {
  std::vector<std::array<double, 2>> out;
  out.reserve(layers_.size());
  for (const auto& l : layers_) out.push_back(l.model->predict_proba(l.features.row(tweet, lex)));
  return out;
}

CascadeDecision CascadeModel::classify(const ProcessedTweet& tweet, const SentimentLexicons& lex) const {
  // only evaluate the layers the tweet reaches
  const auto sp = specs();
  std::vector<std::array<double, 2>> probs;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    probs.push_back(layers_[i].model->predict_proba(layers_[i].features.row(tweet, lex)));
    const auto& p = probs.back();
    const int k = p[1] > p[0] ? 1 : 0;
    if (!(p[k] > depth_) || sp[i].outcome[k]) break;
  }
  return decide(std::span(sp).first(probs.size()), probs, depth_);
}

CascadeModel CascadeModel::assemble(Architecture a, double depth, std::vector<CascadeLayer> layers) {
  if (layers.size() != layer_count(a)) throw Error(ErrorKind::InvalidArgument, "wrong number of cascade layers");
  CascadeModel m;
  m.architecture_ = a;
  m.set_depth(depth);
  m.layers_ = std::move(layers);
  return m;
}

CascadeModel train_cascade(std::span<const ProcessedTweet> tweets, std::span<const EmotionLabel> labels,
                           const CascadeConfig& cfg, const SentimentLexicons& lex) {
  cfg.validate();
  if (tweets.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "tweets and labels differ in count");
  CascadeModel m;
  m.architecture_ = cfg.architecture;
  m.depth_ = cfg.depth;
  const auto specs = layer_specs(cfg.architecture);
  std::optional<LayerFeatures> shared;
  if (cfg.global_selection) {
    std::vector<int> y;
    for (auto l : labels) y.push_back(static_cast<int>(index_of(l)));
    shared = LayerFeatures::fit(tweets, y, cfg.features[0], lex, nullptr, kAllLabels.size());
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    const std::string where = "layer " + std::to_string(i + 1);
    std::vector<ProcessedTweet> sub;
    std::vector<int> y;
    for (std::size_t r = 0; r < tweets.size(); ++r) {
      if (!spec.members.empty() && !contains(spec.members, labels[r])) continue;
      sub.push_back(tweets[r]);
      y.push_back(contains(spec.positive, labels[r]) ? 1 : 0);
    }
    const auto ones = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (ones == 0) throw Error(ErrorKind::Training, where + ": training subset has no " + symbols(spec.positive) + " samples");
    if (ones == y.size()) {
      throw Error(ErrorKind::Training, where + ": training subset has only " + symbols(spec.positive) + " samples");
    }
    try {
      TrainConfig tc = cfg.train[i];
      tc.seed = derive_seed(cfg.seed, i + 1);
      SparseMatrix x;
      CascadeLayer layer;
      layer.spec = spec;
      if (shared) {
        layer.features = *shared;
        x = layer.features.matrix(sub, lex);
      } else {
        layer.features = LayerFeatures::fit(sub, y, cfg.features[i], lex, &x);
      }
      layer.model = train_model(tc, x, y);
      m.layers_.push_back(std::move(layer));
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    }
  }
  return m;
}

void CascadeModel::save(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  json layers = json::array();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    const std::string n = std::to_string(i + 1);
    write_json(dir / ("layer" + n + ".model.json"), l.model->to_json());
    write_json(dir / ("vocab" + n + ".json"), l.features.space.to_json());
    write_json(dir / ("mask" + n + ".json"), l.features.mask.to_json());
    json outcome = json::array();
    for (const auto& o : l.spec.outcome) outcome.push_back(o ? json(label_symbol(*o)) : json("continue"));
    layers.push_back({{"members", labels_json(l.spec.members)},
                      {"positive", labels_json(l.spec.positive)},
                      {"outcome", outcome},
                      {"use_dense", l.features.use_dense}});
  }
  write_json(dir / "cascade.json", {{"format", "oppscreen.cascade"},
                                    {"version", kCascadeFormatVersion},
                                    {"architecture", architecture_name(architecture_)},
                                    {"depth", depth_},
                                    {"layers", layers}});
}

CascadeModel CascadeModel::load(const std::filesystem::path& dir) {
  const auto meta = read_json(dir / "cascade.json");
  if (meta.value("format", std::string()) != "oppscreen.cascade") {
    throw Error(ErrorKind::Parse, (dir / "cascade.json").string() + ": not a cascade bundle");
  }
  if (meta.value("version", -1) != kCascadeFormatVersion) {
    throw Error(ErrorKind::Version, (dir / "cascade.json").string() + ": bundle version " +
                                        std::to_string(meta.value("version", -1)) + " is not supported");
  }
  CascadeModel m;
  try {
    m.architecture_ = parse_architecture(meta.at("architecture").get<std::string>());
    m.set_depth(meta.at("depth").get<double>());
    const auto& layers = meta.at("layers");
    if (layers.size() != layer_count(m.architecture_)) throw Error(ErrorKind::Parse, "wrong number of layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string n = std::to_string(i + 1);
      const auto& lj = layers[i];
      CascadeLayer l;
      l.spec.members = labels_from_json(lj.at("members"));
      l.spec.positive = labels_from_json(lj.at("positive"));
      for (std::size_t k = 0; k < 2; ++k) {
        const auto s = lj.at("outcome").at(k).get<std::string>();
        if (s != "continue") {
          l.spec.outcome[k] = parse_label(s);
          if (!l.spec.outcome[k]) throw Error(ErrorKind::Parse, "unknown outcome '" + s + "'");
        }
      }
      l.features.use_dense = lj.at("use_dense").get<bool>();
      try {
        l.features.space = FeatureSpace::from_json(read_json(dir / ("vocab" + n + ".json")));
        l.features.mask = SelectionMask::from_json(read_json(dir / ("mask" + n + ".json")));
        l.model = model_from_json(read_json(dir / ("layer" + n + ".model.json")));
      } catch (const Error& e) {
        throw Error(e.kind(), "layer " + n + ": " + e.what());
      }
      if (l.features.mask.columns != l.features.space.gram_width() ||
          l.model->input_width() != l.features.width()) {
        throw Error(ErrorKind::Parse, "layer " + n + ": vocabulary, mask and model widths disagree");
      }
      m.layers_.push_back(std::move(l));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, (dir / "cascade.json").string() + ": " + e.what());
  }
  return m;
}

std::vector<DepthPoint> sweep_depth(const CascadeModel& model, std::span<const ProcessedTweet> tweets,
                                    std::span<const EmotionLabel> gold, std::span<const double> depths,
                                    const SentimentLexicons& lex) {
  if (tweets.size() != gold.size()) throw Error(ErrorKind::InvalidArgument, "tweets and labels differ in count");
  for (double d : depths) check_depth(d);
  std::vector<std::vector<std::array<double, 2>>> probs;
  probs.reserve(tweets.size());
  for (const auto& t : tweets) probs.push_back(model.layer_probabilities(t, lex));
  const auto specs = model.specs();
  std::vector<DepthPoint> out;
  for (double d : depths) {
    DepthPoint p;
    p.depth = d;
    std::vector<EmotionLabel> pred;
    for (std::size_t i = 0; i < tweets.size(); ++i) {
      pred.push_back(decide(specs, probs[i], d).label);
      if (pred.back() == EmotionLabel::Opportunity) p.flagged.push_back(i);
    }
    p.report = tolerances(confusion(gold, pred));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace oppscreen
