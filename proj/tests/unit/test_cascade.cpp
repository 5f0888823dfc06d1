#include <algorithm>

#include "core/cascade.hpp"
#include "core/error.hpp"
#include "core/io.hpp"
#include "core/random.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace oppscreen;
using namespace oppscreen::testing;
using L = EmotionLabel;
using P = std::array<double, 2>;

namespace {

// Same P(class 1) for every row.
class ConstantModel final : public ProbabilisticModel {
 public:
  ConstantModel(std::size_t width, double p1) : p1_(p1) { width_ = width; }
  double positive_probability(std::span<const SparseEntry>) const override { return p1_; }
  Algorithm algorithm() const override { return Algorithm::GD; }
  nlohmann::json parameters_json() const override { return {}; }

 private:
  double p1_;
};

std::vector<ProcessedTweet> tiny_corpus() {
  std::vector<ProcessedTweet> out;
  for (int i = 0; i < 4; ++i) {
    ProcessedTweet t;
    t.id = i + 1;
    t.tokens = {i % 2 ? "sube" : "baja", "valor"};
    out.push_back(t);
  }
  return out;
}

CascadeModel stub_cascade(double p1, double depth) {
  const auto corpus = tiny_corpus();
  const std::vector<int> y{0, 1, 0, 1};
  std::vector<CascadeLayer> layers;
  for (const auto& spec : layer_specs(Architecture::Three)) {
    CascadeLayer l;
    l.spec = spec;
    l.features = LayerFeatures::fit(corpus, y, FeaturePipelineConfig{}, bundled_lexicons());
    l.model = std::make_unique<ConstantModel>(l.features.width(), p1);
    layers.push_back(std::move(l));
  }
  return CascadeModel::assemble(Architecture::Three, depth, std::move(layers));
}

CascadeConfig small_config(Algorithm a, std::size_t trees = 15) {
  CascadeConfig cfg;
  for (auto& t : cfg.train) {
    t.algorithm = a;
    t.trees = trees;
  }
  cfg.seed = 11;
  return cfg;
}

bool is_subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_SUITE("cascade") {

TEST_CASE("layer specs of the three architectures") {
  const auto three = layer_specs(Architecture::Three);
  REQUIRE(three.size() == 3);
  CHECK(three[0].members.empty());
  CHECK(three[0].outcome[0] == L::Neutral);
  CHECK_FALSE(three[0].outcome[1]);
  CHECK(three[1].outcome[0] == L::NegativeAwareness);
  CHECK(three[2].outcome[0] == L::PositiveStatement);
  CHECK(three[2].outcome[1] == L::Opportunity);
  CHECK(layer_specs(Architecture::Single).size() == 1);
  CHECK(layer_specs(Architecture::Two).size() == 2);
  CHECK(parse_architecture("three") == Architecture::Three);
  CHECK_THROWS_AS(parse_architecture("four"), Error);
}

TEST_CASE("decide traces through the three layers") {
  const auto specs = layer_specs(Architecture::Three);
  SUBCASE("all the way to P+") {
    const std::vector<P> p{{0.1, 0.9}, {0.2, 0.8}, {0.3, 0.7}};
    const auto d = decide(specs, p, 0.5);
    CHECK(d.label == L::Opportunity);
    CHECK_FALSE(d.abstained);
    CHECK(d.confidence == std::vector<double>{0.9, 0.8, 0.7});
  }
  SUBCASE("layer 1 says N") {
    const std::vector<P> p{{0.9, 0.1}};
    const auto d = decide(specs, p, 0.5);
    CHECK(d.label == L::Neutral);
    CHECK_FALSE(d.abstained);
    CHECK(d.confidence.size() == 1);
  }
  SUBCASE("layer 2 says A-") {
    const std::vector<P> p{{0.1, 0.9}, {0.7, 0.3}};
    CHECK(decide(specs, p, 0.5).label == L::NegativeAwareness);
  }
  SUBCASE("layer 3 says S+") {
    const std::vector<P> p{{0.1, 0.9}, {0.2, 0.8}, {0.6, 0.4}};
    CHECK(decide(specs, p, 0.5).label == L::PositiveStatement);
  }
  SUBCASE("a probability equal to the depth does not exceed it") {
    const std::vector<P> p{{0.1, 0.9}, {0.2, 0.8}, {0.3, 0.7}};
    const auto d = decide(specs, p, 0.8);
    CHECK(d.label == L::Neutral);
    CHECK(d.abstained);
    CHECK(d.abstained_layer == 2);
  }
  SUBCASE("argmax ties go to class 0") {
    const std::vector<P> p{{0.5, 0.5}};
    CHECK(decide(specs, p, 0.4).label == L::Neutral);
  }
  SUBCASE("depth 1 always abstains") {
    const std::vector<P> p{{0.0, 1.0}};
    const auto d = decide(specs, p, 1.0);
    CHECK(d.abstained);
    CHECK(d.abstained_layer == 1);
  }
}

TEST_CASE("decide on the shorter architectures") {
  const auto one = layer_specs(Architecture::Single);
  CHECK(decide(one, std::vector<P>{{0.3, 0.7}}, 0.0).label == L::Opportunity);
  CHECK(decide(one, std::vector<P>{{0.7, 0.3}}, 0.0).label == L::Neutral);
  const auto two = layer_specs(Architecture::Two);
  CHECK(decide(two, std::vector<P>{{0.2, 0.8}, {0.4, 0.6}}, 0.0).label == L::Opportunity);
  CHECK(decide(two, std::vector<P>{{0.2, 0.8}, {0.6, 0.4}}, 0.0).label == L::Neutral);
}

TEST_CASE("a P+ flag at a higher depth is a P+ flag at every lower depth") {
  const auto specs = layer_specs(Architecture::Three);
  Rng rng(5);
  for (int trial = 0; trial < 5000; ++trial) {
    std::vector<P> p;
    for (int i = 0; i < 3; ++i) {
      const double q = rng.uniform();
      p.push_back({1.0 - q, q});
    }
    double lo = rng.uniform(), hi = rng.uniform();
    if (lo > hi) std::swap(lo, hi);
    if (decide(specs, p, hi).label == L::Opportunity) {
      CHECK(decide(specs, p, lo).label == L::Opportunity);
    }
  }
}

TEST_CASE("stub cascade that is always confident about P+") {
  const auto corpus = synthetic_corpus();
  const auto model = stub_cascade(0.99, 0.75);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto d = model.classify(corpus.tweets[i], bundled_lexicons());
    CHECK(d.label == L::Opportunity);
    CHECK(d.confidence.size() == 3);
  }
  SUBCASE("depth 1 flags nothing") {
    const auto none = stub_cascade(0.99, 1.0);
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(none.classify(corpus.tweets[i], bundled_lexicons()).label == L::Neutral);
    }
  }
}

TEST_CASE("classify stops at the deciding layer") {
  const auto model = stub_cascade(0.1, 0.5);  // layer 1 says N with 0.9
  const auto d = model.classify(tiny_corpus()[0], bundled_lexicons());
  CHECK(d.label == L::Neutral);
  CHECK(d.confidence.size() == 1);
}

TEST_CASE("missing S+ names layer 3") {
  const auto& c = synthetic_corpus();
  std::vector<ProcessedTweet> tweets;
  std::vector<L> labels;
  for (std::size_t i = 0; i < c.tweets.size(); ++i) {
    if (c.labels[i] == L::PositiveStatement) continue;
    tweets.push_back(c.tweets[i]);
    labels.push_back(c.labels[i]);
  }
  try {
    train_cascade(tweets, labels, small_config(Algorithm::DT), bundled_lexicons());
    FAIL("expected a training error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Training);
    CHECK(std::string(e.what()).find("layer 3") != std::string::npos);
  }
}

TEST_CASE("trained cascade: depth sweep nests and save/load round-trips") {
  const auto& c = synthetic_corpus();
  const std::size_t n = 300;
  const std::vector<ProcessedTweet> train(c.tweets.begin(), c.tweets.begin() + n);
  const std::vector<L> labels(c.labels.begin(), c.labels.begin() + n);
  const std::vector<ProcessedTweet> probe(c.tweets.begin() + n, c.tweets.end());
  const std::vector<L> gold(c.labels.begin() + n, c.labels.end());
  const auto model = train_cascade(train, labels, small_config(Algorithm::RF), bundled_lexicons());

  const std::vector<double> depths{0.0, 0.25, 0.5, 0.75, 0.9};
  const auto points = sweep_depth(model, probe, gold, depths, bundled_lexicons());
  REQUIRE(points.size() == depths.size());
  for (std::size_t i = 1; i < points.size(); ++i) {
    CHECK(is_subset(points[i].flagged, points[i - 1].flagged));
    CHECK(points[i].flagged.size() <= points[i - 1].flagged.size());
  }
  CHECK_FALSE(points[0].flagged.empty());

  TempDir dir("cascade-roundtrip");
  model.save(dir.path());
  const auto back = CascadeModel::load(dir.path());
  CHECK(back.architecture() == model.architecture());
  CHECK(back.depth() == model.depth());
  for (const auto& t : probe) {
    const auto a = model.classify(t, bundled_lexicons());
    const auto b = back.classify(t, bundled_lexicons());
    CHECK(a.label == b.label);
    CHECK(a.confidence == b.confidence);
  }

  SUBCASE("a different bundle version is refused") {
    auto meta = nlohmann::json::parse(io::read_file(dir.path() / "cascade.json"));
    meta["version"] = kCascadeFormatVersion + 1;
    io::write_file_atomic(dir.path() / "cascade.json", meta.dump());
    try {
      (void)CascadeModel::load(dir.path());
      FAIL("expected a version error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Version);
    }
  }
}

TEST_CASE("planted marker tweets are flagged at depth 0") {
  // P+ tweets carry a token no other class has; a fully grown tree separates
  // them on the training set itself.
  const auto& c = synthetic_corpus();
  std::vector<ProcessedTweet> tweets(c.tweets.begin(), c.tweets.begin() + 200);
  const std::vector<L> labels(c.labels.begin(), c.labels.begin() + 200);
  std::vector<std::size_t> planted;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    if (labels[i] != L::Opportunity) continue;
    tweets[i].tokens.push_back("zqxmarca");
    planted.push_back(i);
  }
  auto cfg = small_config(Algorithm::DT);
  cfg.depth = 0.0;
  const auto model = train_cascade(tweets, labels, cfg, bundled_lexicons());
  for (std::size_t i : planted) CHECK(model.classify(tweets[i], bundled_lexicons()).label == L::Opportunity);
}

TEST_CASE("global selection shares one feature space") {
  const auto& c = synthetic_corpus();
  const std::vector<ProcessedTweet> tweets(c.tweets.begin(), c.tweets.begin() + 200);
  const std::vector<L> labels(c.labels.begin(), c.labels.begin() + 200);
  auto cfg = small_config(Algorithm::DT);
  cfg.global_selection = true;
  const auto model = train_cascade(tweets, labels, cfg, bundled_lexicons());
  const auto& layers = model.layers();
  CHECK(layers[0].features.mask.retained == layers[1].features.mask.retained);
  CHECK(layers[1].features.mask.retained == layers[2].features.mask.retained);
  cfg.global_selection = false;
  const auto per_layer = train_cascade(tweets, labels, cfg, bundled_lexicons());
  CHECK(per_layer.layers()[0].features.width() != per_layer.layers()[2].features.width());
}

TEST_CASE("training is deterministic for a seed") {
  const auto& c = synthetic_corpus();
  const std::vector<ProcessedTweet> tweets(c.tweets.begin(), c.tweets.begin() + 150);
  const std::vector<L> labels(c.labels.begin(), c.labels.begin() + 150);
  const auto a = train_cascade(tweets, labels, small_config(Algorithm::RF, 5), bundled_lexicons());
  const auto b = train_cascade(tweets, labels, small_config(Algorithm::RF, 5), bundled_lexicons());
  for (std::size_t i = 150; i < 250; ++i) {
    CHECK(a.layer_probabilities(c.tweets[i], bundled_lexicons()) ==
          b.layer_probabilities(c.tweets[i], bundled_lexicons()));
  }
}

TEST_CASE("depth outside [0, 1] is rejected") {
  auto m = stub_cascade(0.9, 0.5);
  CHECK_THROWS_AS(m.set_depth(1.5), Error);
  CHECK_THROWS_AS(m.set_depth(-0.1), Error);
  auto cfg = small_config(Algorithm::DT);
  cfg.depth = 2.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

}  // TEST_SUITE
