#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/error.hpp"
#include "core/learners.hpp"
#include "core/random.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace oppscreen;
using nlohmann::json;

namespace {

// Exact isotonic oracle: the minimizer is constant on contiguous blocks and
// takes each block's weighted mean, so enumerating every block partition finds it.
std::vector<double> partition_oracle(const std::vector<double>& y, const std::vector<double>& w) {
  const std::size_t n = y.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_fit;
  for (std::uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
    std::vector<double> fit(n);
    std::size_t start = 0;
    bool ok = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == n - 1 || (cuts >> i) & 1u) {
        double sw = 0, sy = 0;
        for (std::size_t k = start; k <= i; ++k) {
          sw += w[k];
          sy += w[k] * y[k];
        }
        const double m = sy / sw;
        if (m < prev) ok = false;
        prev = m;
        for (std::size_t k = start; k <= i; ++k) fit[k] = m;
        start = i + 1;
      }
    }
    if (!ok) continue;
    double cost = 0;
    for (std::size_t k = 0; k < n; ++k) cost += w[k] * (y[k] - fit[k]) * (y[k] - fit[k]);
    if (cost < best - 1e-12) {
      best = cost;
      best_fit = fit;
    }
  }
  return best_fit;
}

// Brute-force minimization over monotone tuples on a fine value grid.
std::vector<double> grid_oracle(const std::vector<double>& y, double step, double hi) {
  const std::size_t n = y.size();
  const std::size_t m = static_cast<std::size_t>(std::llround(hi / step)) + 1;
  std::vector<std::size_t> idx(n, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_fit;
  for (;;) {
    bool monotone = true;
    for (std::size_t k = 1; k < n; ++k) monotone = monotone && idx[k] >= idx[k - 1];
    if (monotone) {
      double cost = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double v = static_cast<double>(idx[k]) * step;
        cost += (y[k] - v) * (y[k] - v);
      }
      if (cost < best) {
        best = cost;
        best_fit.clear();
        for (std::size_t k = 0; k < n; ++k) best_fit.push_back(static_cast<double>(idx[k]) * step);
      }
    }
    std::size_t k = n;
    while (k > 0 && ++idx[k - 1] == m) idx[--k] = 0;
    if (k == 0) break;
  }
  return best_fit;
}

SparseMatrix to_sparse(const std::vector<std::vector<double>>& rows) {
  SparseMatrix x(rows.empty() ? 0 : rows[0].size());
  for (const auto& r : rows) {
    SparseRow row;
    for (std::uint32_t c = 0; c < r.size(); ++c) {
      if (r[c] != 0) row.push_back({c, r[c]});
    }
    x.add_row(row);
  }
  return x;
}

struct Dataset {
  SparseMatrix x;
  std::vector<int> y;
};

// Noisy linear signal over a few count features.
Dataset synthetic(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(d, 0.0);
    for (auto& v : r) {
      if (rng.uniform() < 0.35) v = static_cast<double>(1 + rng.index(3));
    }
    const double s = r[0] + r[1] - r[2] + (rng.uniform() - 0.5);
    y.push_back(s > 0.5 ? 1 : 0);
    rows.push_back(r);
  }
  y[0] = 0;
  y[1] = 1;
  return {to_sparse(rows), y};
}

TrainConfig config(Algorithm a) {
  TrainConfig c;
  c.algorithm = a;
  c.seed = 42;
  c.trees = 15;
  return c;
}

}  // namespace

TEST_SUITE("learners") {

TEST_CASE("pav fixtures") {
  CHECK(pav(std::vector<double>{3, 1}) == std::vector<double>{2, 2});
  const auto f = pav(std::vector<double>{1, 3, 2});
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[1] == doctest::Approx(2.5));
  CHECK(f[2] == doctest::Approx(2.5));
  CHECK(pav(std::vector<double>{0.1, 0.5, 0.5, 2}) == std::vector<double>{0.1, 0.5, 0.5, 2});
  CHECK_THROWS_AS(pav(std::vector<double>{}), Error);
  CHECK_THROWS_AS(pav(std::vector<double>{1, 2}, std::vector<double>{1, 0}), Error);
}

TEST_CASE("fine-grid brute force agrees with the partition oracle") {
  const auto g = grid_oracle({3, 1}, 0.01, 3);
  CHECK(std::abs(g[0] - 2) < 1e-9);
  CHECK(std::abs(g[1] - 2) < 1e-9);
  const auto h = grid_oracle({1, 3, 2}, 0.05, 3);
  CHECK(std::abs(h[0] - 1) < 1e-9);
  CHECK(std::abs(h[1] - 2.5) < 1e-9);
  CHECK(std::abs(h[2] - 2.5) < 1e-9);
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> y(3);
    for (auto& v : y) v = static_cast<double>(rng.index(31)) / 10.0;
    const auto grid = grid_oracle(y, 0.05, 3);
    const auto part = partition_oracle(y, {1, 1, 1});
    // grid step 0.05 can only represent block means up to 1/60 off
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(grid[k] - part[k]) <= 0.05 / 2 + 1e-9);
  }
}

TEST_CASE("pav matches the oracle on random weighted inputs") {
  Rng rng(7);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + rng.index(7);
    std::vector<double> y(n), w(n);
    for (std::size_t k = 0; k < n; ++k) {
      y[k] = static_cast<double>(rng.index(31)) / 10.0;
      w[k] = 0.5 + static_cast<double>(rng.index(4));
    }
    const auto f = pav(y, w);
    const auto o = partition_oracle(y, w);
    double sy = 0, sf = 0;
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(f[k] - o[k]) < 1e-9);
      if (k) CHECK(f[k] >= f[k - 1]);
      sy += w[k] * y[k];
      sf += w[k] * f[k];
    }
    CHECK(std::abs(sy - sf) < 1e-9);
  }
}

TEST_CASE("isotonic map evaluation clamps and interpolates") {
  const auto m = fit_isotonic(std::vector<double>{0, 2, 1, 3});
  CHECK(m.x == std::vector<double>{0, 1, 2, 3});
  CHECK(m(-5) == 0.0);
  CHECK(m(10) == 3.0);
  CHECK(m(1.5) == doctest::Approx(1.5));
  CHECK(m(0.5) == doctest::Approx(0.75));

  // ties in x are pooled before fitting
  const auto p = fit_isotonic(std::vector<double>{1, 1, 2}, std::vector<double>{0, 1, 1}, std::vector<double>{});
  CHECK(p.x == std::vector<double>{1, 2});
  CHECK(p.y == std::vector<double>{0.5, 1});
  CHECK(p.weights == std::vector<double>{2, 1});
  CHECK(IsotonicMap::from_json(json::parse(p.to_json().dump())) == p);
}

TEST_CASE("two separable points are fitted by every algorithm") {
  const auto x = to_sparse({{1, 0}, {0, 1}});
  const std::vector<int> y{0, 1};
  for (Algorithm a : {Algorithm::GD, Algorithm::DT, Algorithm::RF, Algorithm::SVC}) {
    CAPTURE(algorithm_name(a));
    auto cfg = config(a);
    cfg.trees = 25;
    const auto m = train_model(cfg, x, y);
    for (std::size_t r = 0; r < 2; ++r) {
      const auto p = m->predict_proba(x.row(r));
      CHECK((p[1] > p[0] ? 1 : 0) == y[r]);
    }
  }
}

TEST_CASE("decision tree fits XOR at depth 2") {
  const auto x = to_sparse({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const std::vector<int> y{0, 1, 1, 0};
  auto cfg = config(Algorithm::DT);
  cfg.max_depth = 2;
  const auto t = DecisionTree::train(cfg, x, y);
  CHECK(t->depth() == 2);
  for (std::size_t r = 0; r < 4; ++r) CHECK(t->positive_probability(x.row(r)) == static_cast<double>(y[r]));

  cfg.max_depth = 1;
  const auto stump = DecisionTree::train(cfg, x, y);
  CHECK(stump->depth() == 1);
}

TEST_CASE("leaf probability is the class share of its samples") {
  const auto x = to_sparse({{0}, {0}, {0}, {0}});
  const std::vector<int> y{1, 1, 1, 0};
  const auto t = DecisionTree::train(config(Algorithm::DT), x, y);
  const auto p = t->predict_proba(x.row(0));
  CHECK(p[1] == 0.75);
  CHECK(p[0] == 0.25);
}

TEST_CASE("forest averages its trees") {
  json trees = json::array();
  for (double v : {1.0, 1.0, 1.0, 0.0}) {
    trees.push_back({{"feature", {-1}}, {"threshold", {0.0}}, {"left", {-1}}, {"right", {-1}}, {"value", {v}}});
  }
  const json j{{"format", "oppscreen.model"},
               {"version", kModelFormatVersion},
               {"algorithm", "rf"},
               {"width", 3},
               {"parameters", {{"trees", trees}}}};
  const auto f = model_from_json(j);
  CHECK(f->predict_proba(SparseRow{{1, 2.0}})[1] == 0.75);
}

TEST_CASE("single-tree forest without bootstrap equals the decision tree") {
  const auto train = synthetic(120, 8, 3);
  const auto probe = synthetic(50, 8, 4);
  auto cfg = config(Algorithm::RF);
  cfg.trees = 1;
  cfg.bootstrap = false;
  cfg.max_features = 8;
  const auto rf = RandomForest::train(cfg, train.x, train.y);
  const auto dt = DecisionTree::train(config(Algorithm::DT), train.x, train.y);
  for (std::size_t r = 0; r < probe.x.rows(); ++r) {
    CHECK(rf->predict_proba(probe.x.row(r)) == dt->predict_proba(probe.x.row(r)));
  }
}

TEST_CASE("min_leaf and max_depth bound the tree") {
  const auto d = synthetic(200, 6, 9);
  auto cfg = config(Algorithm::DT);
  cfg.max_depth = 3;
  CHECK(DecisionTree::train(cfg, d.x, d.y)->depth() <= 3);
  cfg.max_depth = 0;
  cfg.min_leaf = 300;
  CHECK(DecisionTree::train(cfg, d.x, d.y)->nodes().size() == 1);
}

TEST_CASE("gradient descent loss never increases") {
  const auto d = synthetic(150, 10, 5);
  auto cfg = config(Algorithm::GD);
  cfg.epochs = 200;
  const auto m = LogisticModel::train(cfg, d.x, d.y);
  const auto& h = m->loss_history();
  REQUIRE(h.size() == 201);
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] + 1e-6);
  CHECK(h.back() < h.front());

  cfg.learning_rate = 1.0;
  const auto fast = LogisticModel::train(cfg, d.x, d.y);
  for (std::size_t i = 1; i < fast->loss_history().size(); ++i) {
    CHECK(fast->loss_history()[i] <= fast->loss_history()[i - 1] + 1e-6);
  }
}

TEST_CASE("probabilities are valid and training is deterministic") {
  const auto d = synthetic(160, 10, 6);
  const auto probe = synthetic(60, 10, 8);
  for (Algorithm a : {Algorithm::GD, Algorithm::DT, Algorithm::RF, Algorithm::SVC}) {
    CAPTURE(algorithm_name(a));
    const auto m1 = train_model(config(a), d.x, d.y);
    const auto m2 = train_model(config(a), d.x, d.y);
    for (std::size_t r = 0; r < probe.x.rows(); ++r) {
      const auto p = m1->predict_proba(probe.x.row(r));
      CHECK(std::abs(p[0] + p[1] - 1.0) <= 1e-9);
      CHECK(p[0] >= 0.0);
      CHECK(p[1] >= 0.0);
      CHECK(p == m2->predict_proba(probe.x.row(r)));
    }
  }
}

TEST_CASE("learners beat the majority rate on a learnable signal") {
  const auto d = synthetic(400, 10, 12);
  const auto probe = synthetic(200, 10, 13);
  const double majority = [&] {
    const double ones = std::accumulate(probe.y.begin(), probe.y.end(), 0.0);
    return std::max(ones, static_cast<double>(probe.y.size()) - ones) / static_cast<double>(probe.y.size());
  }();
  for (Algorithm a : {Algorithm::GD, Algorithm::DT, Algorithm::RF, Algorithm::SVC}) {
    CAPTURE(algorithm_name(a));
    auto cfg = config(a);
    cfg.learning_rate = 2.0;
    cfg.epochs = 300;
    const auto m = train_model(cfg, d.x, d.y);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < probe.x.rows(); ++r) {
      const auto p = m->predict_proba(probe.x.row(r));
      correct += (p[1] > p[0] ? 1 : 0) == probe.y[r];
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(probe.y.size()) > majority);
  }
}

TEST_CASE("svc calibration preserves the margin order") {
  const auto d = synthetic(200, 10, 14);
  const auto probe = synthetic(100, 10, 15);
  const auto m = SvcModel::train(config(Algorithm::SVC), d.x, d.y);
  std::vector<std::pair<double, double>> mp;
  for (std::size_t r = 0; r < probe.x.rows(); ++r) {
    mp.emplace_back(m->margin(probe.x.row(r)), m->predict_proba(probe.x.row(r))[1]);
  }
  std::sort(mp.begin(), mp.end());
  for (std::size_t i = 1; i < mp.size(); ++i) CHECK(mp[i].second >= mp[i - 1].second);
  for (std::size_t i = 1; i < m->calibration().y.size(); ++i) {
    CHECK(m->calibration().y[i] >= m->calibration().y[i - 1]);
  }
}

TEST_CASE("models round-trip through JSON") {
  const auto d = synthetic(120, 8, 16);
  const auto probe = synthetic(80, 8, 17);
  for (Algorithm a : {Algorithm::GD, Algorithm::DT, Algorithm::RF, Algorithm::SVC}) {
    CAPTURE(algorithm_name(a));
    const auto m = train_model(config(a), d.x, d.y);
    const auto back = model_from_json(json::parse(m->to_json().dump()));
    CHECK(back->algorithm() == a);
    for (std::size_t r = 0; r < probe.x.rows(); ++r) {
      CHECK(back->predict_proba(probe.x.row(r)) == m->predict_proba(probe.x.row(r)));
    }
    auto bad = m->to_json();
    bad["version"] = kModelFormatVersion + 1;
    try {
      (void)model_from_json(bad);
      FAIL("expected a version error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Version);
    }
  }
}

TEST_CASE("training preconditions") {
  const auto x = to_sparse({{1, 0}, {0, 1}, {1, 1}});
  CHECK_THROWS_AS(train_model(config(Algorithm::RF), x, std::vector<int>{1, 1, 1}), Error);
  CHECK_THROWS_AS(train_model(config(Algorithm::GD), x, std::vector<int>{0, 1}), Error);
  SparseMatrix bad(2);
  bad.add_row(SparseRow{{0, std::numeric_limits<double>::quiet_NaN()}});
  bad.add_row(SparseRow{{1, 1.0}});
  CHECK_THROWS_AS(train_model(config(Algorithm::DT), bad, std::vector<int>{0, 1}), Error);
  const auto m = train_model(config(Algorithm::DT), x, std::vector<int>{0, 1, 1});
  CHECK_THROWS_AS(m->predict_proba(SparseRow{{5, 1.0}}), Error);
  TrainConfig c;
  CHECK_THROWS_AS(c.set("trees", json(-1)), Error);
  CHECK_THROWS_AS(c.set("no_such_key", json(1)), Error);
  c.set("trees", json(3.0));
  CHECK(c.trees == 3);
  CHECK(TrainConfig::from_json(c.to_json()).to_json() == c.to_json());
}

TEST_CASE("grid cells follow the sorted cartesian order") {
  ParamGrid g;
  g["b"] = {1, 2};
  g["a"] = {"x", "y"};
  const auto cells = grid_cells(g);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0] == json{{"a", "x"}, {"b", 1}});
  CHECK(cells[1] == json{{"a", "x"}, {"b", 2}});
  CHECK(cells[2] == json{{"a", "y"}, {"b", 1}});
  CHECK_THROWS_AS(grid_cells(ParamGrid{}), Error);
}

TEST_CASE("the shipped vectorizer grid") {
  const auto g = default_vectorizer_grid();
  CHECK(g.at("max_df") == std::vector<json>{0.3, 0.35, 0.4, 0.5, 0.7, 0.8, 1});
  CHECK(g.at("min_df") == std::vector<json>{0, 0.001, 0.005, 0.008, 0.01});
  CHECK(g.at("ngram_range").size() == 8);
  CHECK(g.at("ngram_range")[4] == json::array({1, 4}));
  CHECK(g.at("max_features").back().is_null());
  CHECK(grid_cells(g).size() == 7 * 5 * 8 * 4);
}

TEST_CASE("scoring metrics") {
  const std::vector<int> gold{1, 1, 0, 0, 1};
  const std::vector<int> pred{1, 0, 1, 0, 1};
  CHECK(score_predictions(Metric::Accuracy, gold, pred) == doctest::Approx(0.6));
  CHECK(score_predictions(Metric::Precision, gold, pred) == doctest::Approx(2.0 / 3.0));
  CHECK(score_predictions(Metric::F1, gold, pred) == doctest::Approx(2.0 / 3.0));
  CHECK(score_predictions(Metric::Precision, gold, std::vector<int>(5, 0)) == 0.0);
}

TEST_CASE("grid search") {
  std::vector<ProcessedTweet> tweets;
  std::vector<int> labels;
  const char* fill[] = {"bolsa", "mercado", "valor", "acción", "semana"};
  for (int i = 0; i < 30; ++i) {
    ProcessedTweet t;
    t.id = i;
    const bool pos = i % 5 < 2;
    t.tokens = {fill[i % 5], pos ? "oportunidad" : "caída", fill[(i * 3 + 1) % 5]};
    tweets.push_back(t);
    labels.push_back(pos ? 1 : 0);
  }
  FeaturePipelineConfig fc;
  fc.chars.ngram_max = 3;
  fc.char_words.ngram_max = 3;
  fc.words.ngram_max = 2;
  fc.chars.max_df = fc.char_words.max_df = fc.words.max_df = 1.0;
  TrainConfig tc = config(Algorithm::DT);
  const auto& lex = oppscreen::testing::bundled_lexicons();

  SUBCASE("single cell") {
    ParamGrid g{{"max_depth", {json(2)}}};
    const auto r = grid_search(tweets, labels, fc, tc, g, 3, Metric::F1, lex);
    CHECK(r.best == json{{"max_depth", 2}});
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].second.size() == 3);
  }
  SUBCASE("a dominating cell wins regardless of position") {
    // a single-leaf tree predicts the majority (0) class: F1 0 on every fold
    ParamGrid g{{"min_leaf", {json(1000), json(1)}}};
    const auto r = grid_search(tweets, labels, fc, tc, g, 3, Metric::F1, lex);
    CHECK(r.best == json{{"min_leaf", 1}});
    for (std::size_t f = 0; f < 3; ++f) CHECK(r.cells[1].second[f] > r.cells[0].second[f]);
    CHECK(r.best_score == 1.0);
  }
  SUBCASE("ties go to the earlier cell") {
    ParamGrid g{{"min_leaf", {json(1), json(2)}}};
    const auto r = grid_search(tweets, labels, fc, tc, g, 3, Metric::Accuracy, lex);
    REQUIRE(r.cells[0].second == r.cells[1].second);
    CHECK(r.best == json{{"min_leaf", 1}});
  }
  SUBCASE("errors name the cell and fold") {
    ParamGrid g{{"min_leaf", {json(0)}}};
    try {
      (void)grid_search(tweets, labels, fc, tc, g, 3, Metric::F1, lex);
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string what = e.what();
      CHECK(what.find("min_leaf") != std::string::npos);
      CHECK(what.find("fold 1") != std::string::npos);
    }
  }
}

}  // TEST_SUITE
