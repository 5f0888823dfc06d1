#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "core/labels.hpp"
#include "core/preprocess.hpp"
#include "json.hpp"

namespace oppscreen {

// counts[gold][predicted], both in S+, P+, N, A- order.
struct ConfusionMatrix4 {
  std::array<std::array<std::uint64_t, kLabelCount>, kLabelCount> counts{};

  std::uint64_t& at(EmotionLabel gold, EmotionLabel predicted) {
    return counts[index_of(gold)][index_of(predicted)];
  }
  std::uint64_t at(EmotionLabel gold, EmotionLabel predicted) const {
    return counts[index_of(gold)][index_of(predicted)];
  }
  std::uint64_t total() const;
  std::uint64_t column_total(EmotionLabel predicted) const;
  std::uint64_t row_total(EmotionLabel gold) const;

  ConfusionMatrix4& operator+=(const ConfusionMatrix4& o);
  bool operator==(const ConfusionMatrix4&) const = default;

  nlohmann::json to_json() const;
  static ConfusionMatrix4 from_json(const nlohmann::json& j);
};

ConfusionMatrix4 confusion(std::span<const EmotionLabel> gold, std::span<const EmotionLabel> predicted);

// Metrics of the opportunity column. A zero denominator leaves the value empty ("n/a").
struct ToleranceReport {
  std::optional<double> precision;
  std::optional<double> tau1;
  std::optional<double> tau2;
  std::optional<double> coverage;  // P+ flagged among gold P+
  ConfusionMatrix4 matrix;

  nlohmann::json to_json() const;
  // Recomputed from the stored matrix.
  static ToleranceReport from_json(const nlohmann::json& j);
};

ToleranceReport tolerances(const ConfusionMatrix4& cm);

struct TickerHistogram {
  std::map<std::string, std::uint64_t> counts;
  std::set<std::string> upper_quartile;
  double threshold = 0.0;  // 75th percentile of the counts

  // Rows sorted by count descending, then ticker.
  std::vector<std::pair<std::string, std::uint64_t>> ranked() const;
  nlohmann::json to_json() const;
  static TickerHistogram from_json(const nlohmann::json& j);
  std::string to_csv() const;
};

// Linear-interpolation percentile (q in [0, 100]) of a non-empty sample.
double percentile(std::vector<double> values, double q);

// Counts tickers of the tweets labelled P+; other labels are ignored.
TickerHistogram ticker_histogram(std::span<const std::pair<ProcessedTweet, EmotionLabel>> flagged);

// "n/a" for an empty value, otherwise the fraction.
nlohmann::json optional_json(const std::optional<double>& v);
std::optional<double> optional_from_json(const nlohmann::json& j);

}  // namespace oppscreen
