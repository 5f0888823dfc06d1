#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/cascade.hpp"
#include "core/metrics.hpp"
#include "json.hpp"

namespace oppscreen {

// Protocols: 1 single layer, 2 two layers, 3 two layers with depth,
// 4 three layers with depth.
Architecture protocol_architecture(int protocol);
bool protocol_uses_depth(int protocol);
void check_protocol(int protocol);

struct DepthPolicy {
  // fixed: every fold uses `fixed`. automatic: each fold holds out part of
  // its training split and picks the candidate with the best opportunity
  // precision whose coverage reaches `coverage_target`.
  bool automatic = false;
  double fixed = 0.75;
  double coverage_target = 0.10;
  std::vector<double> candidates{0.5, 0.6, 0.7, 0.75, 0.8, 0.85, 0.9};
  std::size_t inner_folds = 5;  // 1/inner_folds of the training split is held out

  void validate() const;
};

struct ExperimentConfig {
  int protocol = 4;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  CascadeConfig cascade;  // architecture and depth are set from the protocol
  DepthPolicy depth;
  std::vector<double> sweep_depths{0.0, 0.25, 0.5, 0.75, 0.9};

  void validate() const;
};

struct MeanMetrics {
  std::optional<double> precision, tau1, tau2, coverage;
  std::size_t defined_folds = 0;  // folds with at least one P+ prediction

  nlohmann::json to_json() const;
  static MeanMetrics from_json(const nlohmann::json& j);
};

// Mean over the folds where each value is defined.
MeanMetrics mean_metrics(std::span<const ToleranceReport> reports);

struct FoldResult {
  std::size_t fold = 0;  // 1-based
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double depth = 0.0;
  ToleranceReport report;
  std::vector<ToleranceReport> sweep;  // one per sweep depth
};

struct ExperimentReport {
  int protocol = 0;
  std::string algorithm;
  std::string feature_set;  // "all" or "basic"
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  bool automatic_depth = false;
  std::vector<FoldResult> per_fold;
  MeanMetrics mean;
  ToleranceReport micro;  // pooled matrix over all folds
  double mean_depth = 0.0;
  std::vector<double> sweep_depths;
  std::vector<MeanMetrics> sweep;
  TickerHistogram tickers;  // P+ flags on the test folds

  nlohmann::json to_json() const;
  // Reads a saved report; per-fold sweep points are not stored and stay empty.
  static ExperimentReport from_json(const nlohmann::json& j);
  // Aligned table: Classifier, Features, Precision, tau1, tau2, Depth, Coverage.
  std::string to_text() const;
  std::string sweep_csv() const;
};

// Trains on 1 - 1/inner_folds of the given split and returns the candidate
// depth with the best held-out precision among those reaching the coverage
// target (lowest candidate when none does). `fold` salts the inner split.
double select_depth(std::span<const ProcessedTweet> tweets, std::span<const EmotionLabel> labels,
                    const ExperimentConfig& cfg, std::size_t fold, const SentimentLexicons& lex);

ExperimentReport run_numerical_test(std::span<const ProcessedTweet> tweets, std::span<const EmotionLabel> labels,
                                    const ExperimentConfig& cfg, const SentimentLexicons& lex);

// Differences (b - a) of the mean precision and tolerances.
nlohmann::json delta_table(const ExperimentReport& a, const ExperimentReport& b);
std::string delta_text(const ExperimentReport& a, const ExperimentReport& b);

}  // namespace oppscreen
