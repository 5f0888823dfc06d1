#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/features.hpp"
#include "core/sparse.hpp"
#include "json.hpp"

namespace oppscreen {

// ---- isotonic regression ---------------------------------------------------

// Piecewise-linear non-decreasing map through (x_i, y_i); constant outside.
struct IsotonicMap {
  std::vector<double> x;        // strictly increasing breakpoints
  std::vector<double> y;        // fitted values, non-decreasing
  std::vector<double> weights;  // pooled weight per breakpoint

  double operator()(double v) const;

  nlohmann::json to_json() const;
  static IsotonicMap from_json(const nlohmann::json& j);
  bool operator==(const IsotonicMap&) const = default;
};

// Pool-adjacent-violators: minimizes sum w_i (y_i - f_i)^2 subject to
// f_1 <= ... <= f_n. Empty weights mean all ones; weights must be positive.
std::vector<double> pav(std::span<const double> y, std::span<const double> weights = {});

// Breakpoints are the positions 0..n-1.
IsotonicMap fit_isotonic(std::span<const double> y, std::span<const double> weights = {});
// Regression of y on x: observations sharing an x are pooled first.
IsotonicMap fit_isotonic(std::span<const double> x, std::span<const double> y,
                         std::span<const double> weights);

// ---- training configuration ------------------------------------------------

enum class Algorithm : std::uint8_t { GD, DT, RF, SVC };

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

struct TrainConfig {
  Algorithm algorithm = Algorithm::RF;
  std::uint64_t seed = 0;

  // gd
  double learning_rate = 0.1;
  std::size_t epochs = 100;
  double l2 = 1e-4;
  std::size_t batch_size = 0;  // 0 = full batch

  // dt / rf
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_leaf = 1;
  std::size_t trees = 100;
  bool bootstrap = true;
  std::size_t max_features = 0;  // rf: 0 = floor(sqrt(d)); dt always uses every feature

  // svc
  double lambda = 1e-4;
  std::size_t svc_epochs = 50;
  double calibration_fraction = 0.2;

  // Sets one hyperparameter by name; numbers arrive as doubles.
  void set(std::string_view name, const nlohmann::json& value);
  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

// ---- models ----------------------------------------------------------------

class ProbabilisticModel {
 public:
  virtual ~ProbabilisticModel() = default;

  // P(class 1) for one design row.
  virtual double positive_probability(std::span<const SparseEntry> row) const = 0;
  virtual Algorithm algorithm() const = 0;
  virtual nlohmann::json parameters_json() const = 0;

  std::size_t input_width() const { return width_; }

  // {P(class 0), P(class 1)}; throws on a column outside the model's width.
  std::array<double, 2> predict_proba(std::span<const SparseEntry> row) const;

  nlohmann::json to_json() const;

 protected:
  std::size_t width_ = 0;
};

// Logistic regression on L2-normalized rows, trained by gradient descent.
class LogisticModel final : public ProbabilisticModel {
 public:
  static std::unique_ptr<LogisticModel> train(const TrainConfig& cfg, const SparseMatrix& x,
                                              std::span<const int> y);
  double positive_probability(std::span<const SparseEntry> row) const override;
  Algorithm algorithm() const override { return Algorithm::GD; }
  nlohmann::json parameters_json() const override;
  static std::unique_ptr<LogisticModel> from_json(const nlohmann::json& j, std::size_t width);

  // Mean training log-loss plus the L2 term, before the first and after every epoch.
  const std::vector<double>& loss_history() const { return loss_history_; }

 private:
  std::vector<double> w_;
  double b_ = 0.0;
  std::vector<double> loss_history_;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when value <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // fraction of class-1 weight reaching the node
};

// CART with Gini impurity.
class DecisionTree final : public ProbabilisticModel {
 public:
  // sample_weight empty = all ones. feature_subset 0 = every feature is a
  // candidate at each node; otherwise that many are drawn per node with rng_seed.
  static std::unique_ptr<DecisionTree> train(const TrainConfig& cfg, const SparseMatrix& x,
                                             std::span<const int> y,
                                             std::span<const double> sample_weight = {},
                                             std::size_t feature_subset = 0,
                                             std::uint64_t rng_seed = 0);
  double positive_probability(std::span<const SparseEntry> row) const override;
  Algorithm algorithm() const override { return Algorithm::DT; }
  nlohmann::json parameters_json() const override;
  static std::unique_ptr<DecisionTree> from_json(const nlohmann::json& j, std::size_t width);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

class RandomForest final : public ProbabilisticModel {
 public:
  static std::unique_ptr<RandomForest> train(const TrainConfig& cfg, const SparseMatrix& x,
                                             std::span<const int> y);
  double positive_probability(std::span<const SparseEntry> row) const override;
  Algorithm algorithm() const override { return Algorithm::RF; }
  nlohmann::json parameters_json() const override;
  static std::unique_ptr<RandomForest> from_json(const nlohmann::json& j, std::size_t width);

  std::size_t size() const { return trees_.size(); }

 private:
  std::vector<std::unique_ptr<DecisionTree>> trees_;
};

// Linear SVM (hinge loss + L2) by SGD; margins mapped to probabilities by an
// isotonic fit on a stratified held-out split.
class SvcModel final : public ProbabilisticModel {
 public:
  static std::unique_ptr<SvcModel> train(const TrainConfig& cfg, const SparseMatrix& x,
                                         std::span<const int> y);
  double positive_probability(std::span<const SparseEntry> row) const override;
  Algorithm algorithm() const override { return Algorithm::SVC; }
  nlohmann::json parameters_json() const override;
  static std::unique_ptr<SvcModel> from_json(const nlohmann::json& j, std::size_t width);

  double margin(std::span<const SparseEntry> row) const;
  const IsotonicMap& calibration() const { return calibration_; }

 private:
  std::vector<double> w_;
  double b_ = 0.0;
  IsotonicMap calibration_;
};

// y holds 0/1 labels; both classes must be present.
std::unique_ptr<ProbabilisticModel> train_model(const TrainConfig& cfg, const SparseMatrix& x,
                                                std::span<const int> y);
std::unique_ptr<ProbabilisticModel> model_from_json(const nlohmann::json& j);

inline constexpr int kModelFormatVersion = 1;

// ---- grid search -----------------------------------------------------------

// Parameter name -> candidate values. Gram keys (max_df, min_df, ngram_range,
// max_features) apply to all three gram families; any other key is a
// TrainConfig hyperparameter.
using ParamGrid = std::map<std::string, std::vector<nlohmann::json>>;

// The n-gram grid shipped as the default for vectorizer tuning.
ParamGrid default_vectorizer_grid();

// Cells of the sorted cartesian product; the last name varies fastest.
std::vector<nlohmann::json> grid_cells(const ParamGrid& grid);

enum class Metric : std::uint8_t { Accuracy, Precision, F1 };
std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view s);
// Metric of class-1 predictions; precision/F1 with no positive predictions score 0.
double score_predictions(Metric m, std::span<const int> gold, std::span<const int> predicted);

// Applies a grid cell on top of the base configurations.
void apply_cell(const nlohmann::json& cell, FeaturePipelineConfig& features, TrainConfig& train);

struct GridSearchResult {
  nlohmann::json best;
  double best_score = 0.0;
  std::vector<std::pair<nlohmann::json, std::vector<double>>> cells;  // per-fold scores
};

// k-fold CV (stratified on the binary label) over every cell; ties go to
// the earlier cell. Training errors are rethrown naming the cell and fold.
GridSearchResult grid_search(std::span<const ProcessedTweet> tweets, std::span<const int> labels,
                             const FeaturePipelineConfig& features, const TrainConfig& train,
                             const ParamGrid& grid, std::size_t folds, Metric metric,
                             const SentimentLexicons& lexicons);

}  // namespace oppscreen
