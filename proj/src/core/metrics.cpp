#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace oppscreen {

using nlohmann::json;

std::uint64_t ConfusionMatrix4::total() const {
  std::uint64_t s = 0;
  for (const auto& row : counts) {
    for (auto v : row) s += v;
  }
  return s;
}

std::uint64_t ConfusionMatrix4::column_total(EmotionLabel predicted) const {
  std::uint64_t s = 0;
  for (const auto& row : counts) s += row[index_of(predicted)];
  return s;
}

std::uint64_t ConfusionMatrix4::row_total(EmotionLabel gold) const {
  std::uint64_t s = 0;
  for (auto v : counts[index_of(gold)]) s += v;
  return s;
}

ConfusionMatrix4& ConfusionMatrix4::operator+=(const ConfusionMatrix4& o) {
  for (std::size_t g = 0; g < kLabelCount; ++g) {
    for (std::size_t p = 0; p < kLabelCount; ++p) counts[g][p] += o.counts[g][p];
  }
  return *this;
}

json ConfusionMatrix4::to_json() const {
  json labels = json::array();
  for (EmotionLabel l : kAllLabels) labels.push_back(label_symbol(l));
  return {{"labels", labels}, {"rows_gold_columns_predicted", counts}};
}

ConfusionMatrix4 ConfusionMatrix4::from_json(const json& j) {
  ConfusionMatrix4 cm;
  const auto& rows = j.at("rows_gold_columns_predicted");
  if (!rows.is_array() || rows.size() != kLabelCount) throw Error(ErrorKind::Parse, "confusion matrix must be 4x4");
  for (std::size_t g = 0; g < kLabelCount; ++g) {
    if (!rows[g].is_array() || rows[g].size() != kLabelCount) throw Error(ErrorKind::Parse, "confusion matrix must be 4x4");
    for (std::size_t p = 0; p < kLabelCount; ++p) cm.counts[g][p] = rows[g][p].get<std::uint64_t>();
  }
  return cm;
}

ConfusionMatrix4 confusion(std::span<const EmotionLabel> gold, std::span<const EmotionLabel> predicted) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorKind::InvalidArgument, "gold and predicted label lists differ in length");
  }
  ConfusionMatrix4 cm;
  for (std::size_t i = 0; i < gold.size(); ++i) ++cm.at(gold[i], predicted[i]);
  return cm;
}

ToleranceReport tolerances(const ConfusionMatrix4& cm) {
  using L = EmotionLabel;
  ToleranceReport r;
  r.matrix = cm;
  const std::uint64_t flagged = cm.column_total(L::Opportunity);
  if (flagged > 0) {
    const double t = static_cast<double>(flagged);
    const std::uint64_t hit = cm.at(L::Opportunity, L::Opportunity);
    const std::uint64_t mild = hit + cm.at(L::PositiveStatement, L::Opportunity);
    r.precision = static_cast<double>(hit) / t;
    r.tau1 = static_cast<double>(mild) / t;
    // everything but A- in the column
    r.tau2 = static_cast<double>(flagged - cm.at(L::NegativeAwareness, L::Opportunity)) / t;
  }
  const std::uint64_t gold = cm.row_total(L::Opportunity);
  if (gold > 0) r.coverage = static_cast<double>(cm.at(L::Opportunity, L::Opportunity)) / static_cast<double>(gold);
  return r;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json("n/a"); }

std::optional<double> optional_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  return std::nullopt;
}

json ToleranceReport::to_json() const {
  return {{"precision", optional_json(precision)},
          {"tau1", optional_json(tau1)},
          {"tau2", optional_json(tau2)},
          {"coverage", optional_json(coverage)},
          {"confusion", matrix.to_json()}};
}

ToleranceReport ToleranceReport::from_json(const json& j) {
  return tolerances(ConfusionMatrix4::from_json(j.at("confusion")));
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "percentile of an empty sample");
  if (!(q >= 0 && q <= 100)) throw Error(ErrorKind::InvalidArgument, "percentile rank must be in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

TickerHistogram ticker_histogram(std::span<const std::pair<ProcessedTweet, EmotionLabel>> flagged) {
  TickerHistogram h;
  for (const auto& [tweet, label] : flagged) {
    if (label != EmotionLabel::Opportunity) continue;
    for (const auto& t : tweet.tickers) ++h.counts[t];
  }
  if (h.counts.empty()) return h;
  std::vector<double> c;
  for (const auto& [t, n] : h.counts) c.push_back(static_cast<double>(n));
  h.threshold = percentile(c, 75.0);
  for (const auto& [t, n] : h.counts) {
    if (static_cast<double>(n) >= h.threshold) h.upper_quartile.insert(t);
  }
  return h;
}

std::vector<std::pair<std::string, std::uint64_t>> TickerHistogram::ranked() const {
  std::vector<std::pair<std::string, std::uint64_t>> rows(counts.begin(), counts.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return rows;
}

json TickerHistogram::to_json() const {
  json rows = json::array();
  for (const auto& [t, n] : ranked()) rows.push_back({{"ticker", t}, {"count", n}, {"upper_quartile", upper_quartile.count(t) > 0}});
  return {{"tickers", rows}, {"quartile_threshold", threshold}, {"upper_quartile", upper_quartile}};
}

TickerHistogram TickerHistogram::from_json(const json& j) {
  TickerHistogram h;
  for (const auto& row : j.at("tickers")) h.counts[row.at("ticker").get<std::string>()] = row.at("count").get<std::uint64_t>();
  h.upper_quartile = j.at("upper_quartile").get<std::set<std::string>>();
  h.threshold = j.at("quartile_threshold").get<double>();
  return h;
}

std::string TickerHistogram::to_csv() const {
  std::string out = "ticker,count,upper_quartile\n";
  for (const auto& [t, n] : ranked()) {
    out += t + "," + std::to_string(n) + "," + (upper_quartile.count(t) ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace oppscreen
