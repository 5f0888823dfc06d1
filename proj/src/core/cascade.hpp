#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/features.hpp"
#include "core/labels.hpp"
#include "core/learners.hpp"
#include "core/metrics.hpp"
#include "json.hpp"

namespace oppscreen {

// single:  P+ vs rest
// two:     N vs rest, then P+ vs rest
// three:   N vs rest, then {P+, S+} vs A-, then P+ vs S+
enum class Architecture : std::uint8_t { Single = 1, Two = 2, Three = 3 };

std::string_view architecture_name(Architecture a);
Architecture parse_architecture(std::string_view s);
std::size_t layer_count(Architecture a);

// One binary stage. Class 1 = gold label in `positive`; each class either
// ends with a label or passes the tweet to the next layer.
struct LayerSpec {
  std::vector<EmotionLabel> members;   // training subset (every label when empty)
  std::vector<EmotionLabel> positive;  // labels mapped to class 1
  std::array<std::optional<EmotionLabel>, 2> outcome;  // empty = continue

  bool operator==(const LayerSpec&) const = default;
};

std::vector<LayerSpec> layer_specs(Architecture a);

struct CascadeConfig {
  Architecture architecture = Architecture::Three;
  std::array<TrainConfig, 3> train;
  std::array<FeaturePipelineConfig, 3> features;
  double depth = 0.75;  // shared decision depth in [0, 1]
  std::uint64_t seed = 0;
  // false: each layer fits its vocabulary and selection on its own subset.
  // true: one vocabulary and mask fitted on the whole split against the four
  // labels, shared by every layer (features[0] settings).
  bool global_selection = false;

  void validate() const;
};

struct CascadeDecision {
  EmotionLabel label = EmotionLabel::Neutral;
  std::vector<double> confidence;  // max class probability of each layer reached
  bool abstained = false;
  std::size_t abstained_layer = 0;  // 1-based, 0 when not abstained
};

// Applies the depth rule to precomputed layer probabilities (one {P0, P1}
// per layer; layers past the stopping point are ignored). A layer decides
// only when its top probability exceeds `depth`; argmax ties go to class 0.
CascadeDecision decide(std::span<const LayerSpec> specs, std::span<const std::array<double, 2>> probabilities,
                       double depth);

struct CascadeLayer {
  LayerSpec spec;
  LayerFeatures features;
  std::unique_ptr<ProbabilisticModel> model;
};

class CascadeModel {
 public:
  Architecture architecture() const { return architecture_; }
  double depth() const { return depth_; }
  void set_depth(double depth);
  const std::vector<CascadeLayer>& layers() const { return layers_; }
  std::vector<LayerSpec> specs() const;

  // Probabilities of every layer for one tweet.
  std::vector<std::array<double, 2>> layer_probabilities(const ProcessedTweet& tweet,
                                                         const SentimentLexicons& lex) const;

  CascadeDecision classify(const ProcessedTweet& tweet, const SentimentLexicons& lex) const;

  // Directory bundle: layer{i}.model.json, vocab{i}.json, mask{i}.json, cascade.json.
  void save(const std::filesystem::path& dir) const;
  static CascadeModel load(const std::filesystem::path& dir);

  friend CascadeModel train_cascade(std::span<const ProcessedTweet>, std::span<const EmotionLabel>,
                                    const CascadeConfig&, const SentimentLexicons&);
  // Assembles a cascade from already-built layers (stub models in tests).
  static CascadeModel assemble(Architecture a, double depth, std::vector<CascadeLayer> layers);

 private:
  Architecture architecture_ = Architecture::Three;
  double depth_ = 0.0;
  std::vector<CascadeLayer> layers_;
};

// Each layer is fitted (features, selection, model) on its own subset.
CascadeModel train_cascade(std::span<const ProcessedTweet> tweets, std::span<const EmotionLabel> labels,
                           const CascadeConfig& cfg, const SentimentLexicons& lex);

struct DepthPoint {
  double depth = 0.0;
  ToleranceReport report;
  std::vector<std::size_t> flagged;  // indices predicted P+
};

// Classifies at each depth; probabilities are computed once per tweet.
std::vector<DepthPoint> sweep_depth(const CascadeModel& model, std::span<const ProcessedTweet> tweets,
                                    std::span<const EmotionLabel> gold, std::span<const double> depths,
                                    const SentimentLexicons& lex);

inline constexpr int kCascadeFormatVersion = 1;

}  // namespace oppscreen
