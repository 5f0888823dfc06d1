#include <cmath>

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/random.hpp"
#include "doctest.h"

using namespace oppscreen;
using L = EmotionLabel;

namespace {

// Column of predicted P+ filled from gold (S+, P+, N, A-) counts.
ConfusionMatrix4 column(std::uint64_t s, std::uint64_t p, std::uint64_t n, std::uint64_t a) {
  ConfusionMatrix4 cm;
  cm.at(L::PositiveStatement, L::Opportunity) = s;
  cm.at(L::Opportunity, L::Opportunity) = p;
  cm.at(L::Neutral, L::Opportunity) = n;
  cm.at(L::NegativeAwareness, L::Opportunity) = a;
  return cm;
}

ProcessedTweet with_tickers(std::vector<std::string> t) {
  ProcessedTweet p;
  p.tickers = std::move(t);
  return p;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("fixture column (1,7,1,1)") {
  const auto r = tolerances(column(1, 7, 1, 1));
  REQUIRE(r.precision);
  CHECK(*r.precision == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(*r.tau1 == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(*r.tau2 == doctest::Approx(0.9).epsilon(1e-12));
  // all 7 gold P+ were flagged
  CHECK(*r.coverage == 1.0);
}

TEST_CASE("coverage counts gold P+ outside the column") {
  auto cm = column(0, 3, 0, 0);
  cm.at(L::Opportunity, L::Neutral) = 5;
  cm.at(L::Opportunity, L::NegativeAwareness) = 2;
  const auto r = tolerances(cm);
  CHECK(*r.coverage == doctest::Approx(0.3));
  CHECK(*r.precision == 1.0);
}

TEST_CASE("empty column leaves the ratios undefined") {
  ConfusionMatrix4 cm;
  cm.at(L::Neutral, L::Neutral) = 4;
  const auto r = tolerances(cm);
  CHECK_FALSE(r.precision);
  CHECK_FALSE(r.tau1);
  CHECK_FALSE(r.tau2);
  CHECK_FALSE(r.coverage);
  const auto j = r.to_json();
  CHECK(j["precision"] == "n/a");
  CHECK(j["coverage"] == "n/a");
}

TEST_CASE("tolerance ordering and the tau2 identity on random matrices") {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    ConfusionMatrix4 cm;
    for (auto& row : cm.counts) {
      for (auto& c : row) c = rng.index(20);
    }
    const auto r = tolerances(cm);
    const std::uint64_t flagged = cm.column_total(L::Opportunity);
    if (flagged == 0) {
      CHECK_FALSE(r.tau2);
      continue;
    }
    CHECK(*r.tau2 >= *r.tau1);
    CHECK(*r.tau1 >= *r.precision);
    // 1 - A/t and (t - A)/t are the same rational; both integers are exact
    // doubles, so the correctly rounded quotient must match bit for bit.
    const std::uint64_t a = cm.at(L::NegativeAwareness, L::Opportunity);
    CHECK(*r.tau2 == static_cast<double>(flagged - a) / static_cast<double>(flagged));
  }
}

TEST_CASE("confusion counts gold against predicted") {
  const std::vector<L> gold{L::Opportunity, L::Opportunity, L::Neutral, L::NegativeAwareness};
  const std::vector<L> pred{L::Opportunity, L::Neutral, L::Opportunity, L::Opportunity};
  const auto cm = confusion(gold, pred);
  CHECK(cm.at(L::Opportunity, L::Opportunity) == 1);
  CHECK(cm.at(L::Opportunity, L::Neutral) == 1);
  CHECK(cm.column_total(L::Opportunity) == 3);
  CHECK(cm.row_total(L::Opportunity) == 2);
  CHECK(cm.total() == 4);
  CHECK_THROWS_AS(confusion(gold, std::vector<L>{L::Neutral}), Error);
}

TEST_CASE("matrix json round trip") {
  auto cm = column(2, 5, 1, 3);
  cm.at(L::Neutral, L::Neutral) = 9;
  CHECK(ConfusionMatrix4::from_json(cm.to_json()) == cm);
  const auto r = ToleranceReport::from_json(tolerances(cm).to_json());
  CHECK(r.matrix == cm);
  CHECK(r.precision == tolerances(cm).precision);
}

TEST_CASE("percentile interpolates linearly") {
  CHECK(percentile({1, 2, 3, 4}, 75) == doctest::Approx(3.25));
  CHECK(percentile({5}, 75) == 5);
  CHECK(percentile({3, 1, 2}, 50) == 2);
  CHECK(percentile({1, 2, 3, 4}, 100) == 4);
  CHECK_THROWS_AS(percentile({}, 50), Error);
  CHECK_THROWS_AS(percentile({1}, 101), Error);
}

TEST_CASE("ticker histogram and upper quartile") {
  std::vector<std::pair<ProcessedTweet, L>> rows;
  for (int i = 0; i < 3; ++i) rows.emplace_back(with_tickers({"IBEX"}), L::Opportunity);
  rows.emplace_back(with_tickers({"NFLX"}), L::Opportunity);
  rows.emplace_back(with_tickers({"NFLX", "TSLA"}), L::NegativeAwareness);  // not a P+ flag
  const auto h = ticker_histogram(rows);
  CHECK(h.counts.at("IBEX") == 3);
  CHECK(h.counts.at("NFLX") == 1);
  CHECK(h.counts.count("TSLA") == 0);
  // counts {1, 3}: 75th percentile 2.5
  CHECK(h.threshold == doctest::Approx(2.5));
  CHECK(h.upper_quartile == std::set<std::string>{"IBEX"});
  CHECK(h.ranked().front().first == "IBEX");
  CHECK(h.to_csv() == "ticker,count,upper_quartile\nIBEX,3,1\nNFLX,1,0\n");
  const auto back = TickerHistogram::from_json(h.to_json());
  CHECK(back.counts == h.counts);
  CHECK(back.upper_quartile == h.upper_quartile);
}

TEST_CASE("ticker histogram of nothing is empty") {
  const auto h = ticker_histogram({});
  CHECK(h.counts.empty());
  CHECK(h.upper_quartile.empty());
}

}  // TEST_SUITE
