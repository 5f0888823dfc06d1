#include <algorithm>

#include "core/error.hpp"
#include "core/evaluation.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace oppscreen;
using namespace oppscreen::testing;
using L = EmotionLabel;

namespace {

// First `per_class` tweets of each class from the synthetic corpus.
Corpus balanced(std::size_t per_class) {
  const auto& c = synthetic_corpus();
  Corpus out;
  std::array<std::size_t, kLabelCount> taken{};
  for (std::size_t i = 0; i < c.tweets.size(); ++i) {
    auto& n = taken[index_of(c.labels[i])];
    if (n == per_class) continue;
    ++n;
    out.tweets.push_back(c.tweets[i]);
    out.labels.push_back(c.labels[i]);
  }
  return out;
}

ExperimentConfig quick(int protocol, std::size_t folds) {
  ExperimentConfig e;
  e.protocol = protocol;
  e.folds = folds;
  e.seed = 3;
  for (auto& t : e.cascade.train) {
    t.algorithm = Algorithm::RF;
    t.trees = 10;
  }
  return e;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("protocol mapping") {
  CHECK(protocol_architecture(1) == Architecture::Single);
  CHECK(protocol_architecture(2) == Architecture::Two);
  CHECK(protocol_architecture(3) == Architecture::Two);
  CHECK(protocol_architecture(4) == Architecture::Three);
  CHECK_FALSE(protocol_uses_depth(1));
  CHECK_FALSE(protocol_uses_depth(2));
  CHECK(protocol_uses_depth(3));
  CHECK(protocol_uses_depth(4));
  try {
    check_protocol(5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
  CHECK_THROWS_AS(check_protocol(0), Error);
}

TEST_CASE("mean metrics skip undefined folds") {
  ToleranceReport a, b, c;
  a.precision = 0.5;
  a.coverage = 0.2;
  b.precision = 1.0;
  b.coverage = 0.4;
  c.coverage = 0.0;  // no P+ predictions in this fold
  const std::vector<ToleranceReport> reports{a, b, c};
  const auto m = mean_metrics(reports);
  CHECK(*m.precision == doctest::Approx(0.75));
  CHECK(*m.coverage == doctest::Approx(0.2));
  CHECK_FALSE(m.tau1);
  CHECK(m.defined_folds == 2);
}

TEST_CASE("two folds on a 40-tweet fixture") {
  const auto data = balanced(10);
  REQUIRE(data.tweets.size() == 40);
  const auto rep = run_numerical_test(data.tweets, data.labels, quick(4, 2), bundled_lexicons());
  REQUIRE(rep.per_fold.size() == 2);
  ConfusionMatrix4 pooled;
  std::vector<ToleranceReport> folds;
  for (const auto& f : rep.per_fold) {
    // stratified: 5 of each class per fold
    CHECK(f.test_size == 20);
    CHECK(f.train_size == 20);
    CHECK(f.report.matrix.total() == 20);
    for (auto l : kAllLabels) CHECK(f.report.matrix.row_total(l) == 5);
    CHECK(f.depth == 0.75);
    CHECK(f.sweep.size() == rep.sweep_depths.size());
    pooled += f.report.matrix;
    folds.push_back(f.report);
  }
  CHECK(rep.micro.matrix == pooled);
  const auto mean = mean_metrics(folds);
  CHECK(rep.mean.precision == mean.precision);
  CHECK(rep.mean.coverage == mean.coverage);
  CHECK(rep.mean_depth == 0.75);
  // the fixed-depth fold report equals the 0.75 point of the sweep
  const auto at = std::find(rep.sweep_depths.begin(), rep.sweep_depths.end(), 0.75) - rep.sweep_depths.begin();
  CHECK(rep.per_fold[0].sweep[static_cast<std::size_t>(at)].matrix == rep.per_fold[0].report.matrix);
}

TEST_CASE("protocols without depth run at depth 0") {
  const auto data = balanced(10);
  const auto rep = run_numerical_test(data.tweets, data.labels, quick(1, 2), bundled_lexicons());
  for (const auto& f : rep.per_fold) CHECK(f.depth == 0.0);
  CHECK(rep.to_text().find("Classifier") != std::string::npos);
  const auto rep2 = run_numerical_test(data.tweets, data.labels, quick(2, 2), bundled_lexicons());
  CHECK(rep2.to_json()["architecture"] == "two");
}

TEST_CASE("reports are deterministic and survive a json round trip") {
  const auto data = balanced(10);
  const auto a = run_numerical_test(data.tweets, data.labels, quick(4, 2), bundled_lexicons());
  const auto b = run_numerical_test(data.tweets, data.labels, quick(4, 2), bundled_lexicons());
  CHECK(a.to_json().dump() == b.to_json().dump());
  const auto back = ExperimentReport::from_json(a.to_json());
  CHECK(back.to_json().dump() == a.to_json().dump());
  CHECK(back.to_text() == a.to_text());
  CHECK(back.sweep_csv() == a.sweep_csv());
}

TEST_CASE("delta table subtracts the first run") {
  ExperimentReport a, b;
  a.protocol = 1;
  b.protocol = 4;
  a.algorithm = b.algorithm = "rf";
  a.mean.precision = 0.6;
  b.mean.precision = 0.9;
  a.mean.tau1 = 0.7;
  b.mean.tau1 = 0.95;
  b.mean.tau2 = 1.0;
  const auto d = delta_table(a, b);
  CHECK(d["delta"]["precision"].get<double>() == doctest::Approx(0.3));
  CHECK(d["delta"]["tau1"].get<double>() == doctest::Approx(0.25));
  CHECK(d["delta"]["tau2"] == "n/a");
  CHECK(delta_text(a, b).find("+30.00") != std::string::npos);
}

TEST_CASE("automatic depth picks a candidate") {
  const auto data = balanced(20);
  auto cfg = quick(4, 2);
  cfg.depth.automatic = true;
  const double d = select_depth(data.tweets, data.labels, cfg, 1, bundled_lexicons());
  CHECK(std::find(cfg.depth.candidates.begin(), cfg.depth.candidates.end(), d) != cfg.depth.candidates.end());
  SUBCASE("an unreachable coverage target falls back to the lowest candidate") {
    cfg.depth.coverage_target = 1.0;
    cfg.depth.candidates = {0.95, 0.99};
    CHECK(select_depth(data.tweets, data.labels, cfg, 1, bundled_lexicons()) == 0.95);
  }
}

TEST_CASE("fold errors carry the fold number") {
  const auto data = balanced(10);
  auto cfg = quick(4, 2);
  // each training fold holds 5 tweets per class, too few for 10 inner folds
  cfg.depth.automatic = true;
  cfg.depth.inner_folds = 10;
  try {
    run_numerical_test(data.tweets, data.labels, cfg, bundled_lexicons());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
    CHECK(std::string(e.what()).find("fold 1: ") == 0);
  }
  // layer settings are checked before any fold runs
  cfg = quick(4, 2);
  cfg.cascade.features[2].words.min_df = 0.9;
  const auto msg = [&] {
    try {
      run_numerical_test(data.tweets, data.labels, cfg, bundled_lexicons());
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  }();
  CHECK(msg.find("layer 3") == 0);
}

TEST_CASE("a class smaller than k cannot be stratified") {
  auto data = balanced(10);
  for (std::size_t i = data.tweets.size(); i-- > 0;) {
    if (data.labels[i] != L::PositiveStatement) continue;
    if (std::count(data.labels.begin(), data.labels.end(), L::PositiveStatement) == 1) break;
    data.tweets.erase(data.tweets.begin() + static_cast<std::ptrdiff_t>(i));
    data.labels.erase(data.labels.begin() + static_cast<std::ptrdiff_t>(i));
  }
  try {
    run_numerical_test(data.tweets, data.labels, quick(4, 2), bundled_lexicons());
    FAIL("expected a data error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
    CHECK(std::string(e.what()).find("S+") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  auto cfg = quick(4, 1);
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = quick(5, 10);
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = quick(4, 10);
  cfg.sweep_depths = {1.2};
  CHECK_THROWS_AS(cfg.validate(), Error);
}

}  // TEST_SUITE
