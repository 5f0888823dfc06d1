#include "core/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/corpus.hpp"
#include "core/error.hpp"
#include "core/random.hpp"

namespace oppscreen {

using nlohmann::json;

namespace {

void check_format(const json& j, std::string_view format, int version) {
  if (!j.is_object() || j.value("format", std::string()) != format) {
    throw Error(ErrorKind::Parse, "not a " + std::string(format) + " document");
  }
  const int v = j.value("version", -1);
  if (v != version) {
    throw Error(ErrorKind::Version, std::string(format) + " version " + std::to_string(v) +
                                        " is not supported (expected " + std::to_string(version) + ")");
  }
}

void check_training_input(const SparseMatrix& x, std::span<const int> y) {
  if (x.rows() != y.size()) throw Error(ErrorKind::InvalidArgument, "feature rows and labels differ in count");
  if (y.size() < 2) throw Error(ErrorKind::Training, "need at least two training samples");
  bool seen[2] = {false, false};
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorKind::InvalidArgument, "labels must be 0 or 1");
    seen[v] = true;
  }
  if (!seen[0] || !seen[1]) throw Error(ErrorKind::Training, "training labels contain a single class");
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (const auto& e : x.row(r)) {
      if (!std::isfinite(e.value)) {
        throw Error(ErrorKind::InvalidArgument, "non-finite feature value in row " + std::to_string(r));
      }
      if (e.col >= x.cols()) throw Error(ErrorKind::InvalidArgument, "column outside the matrix width");
    }
  }
}

// Rows scaled to unit L2 norm (all-zero rows stay zero).
SparseMatrix normalized(const SparseMatrix& x) {
  SparseMatrix out(x.cols());
  SparseRow buf;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    double n2 = 0.0;
    for (const auto& e : row) n2 += e.value * e.value;
    const double s = n2 > 0.0 ? 1.0 / std::sqrt(n2) : 0.0;
    buf.assign(row.begin(), row.end());
    for (auto& e : buf) e.value *= s;
    out.add_row(buf);
  }
  return out;
}

double normalized_dot(std::span<const SparseEntry> row, const std::vector<double>& w) {
  double n2 = 0.0;
  for (const auto& e : row) n2 += e.value * e.value;
  if (n2 == 0.0) return 0.0;
  return dot(row, w) / std::sqrt(n2);
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-z)) without overflow
double softplus_neg(double z) {
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

std::size_t as_count(const json& v, std::string_view name) {
  if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be a number");
  const double d = v.get<double>();
  if (!(d >= 0) || d != std::floor(d) || d > 1e12) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(d);
}

double as_real(const json& v, std::string_view name) {
  if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be a number");
  return v.get<double>();
}

}  // namespace

// ---- isotonic --------------------------------------------------------------

double IsotonicMap::operator()(double v) const {
  if (x.empty()) throw Error(ErrorKind::InvalidArgument, "empty isotonic map");
  if (v <= x.front()) return y.front();
  if (v >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), v);
  const std::size_t hi = static_cast<std::size_t>(it - x.begin());
  const std::size_t lo = hi - 1;
  const double t = (v - x[lo]) / (x[hi] - x[lo]);
  return y[lo] + t * (y[hi] - y[lo]);
}

json IsotonicMap::to_json() const { return {{"x", x}, {"y", y}, {"weights", weights}}; }

IsotonicMap IsotonicMap::from_json(const json& j) {
  IsotonicMap m;
  m.x = j.at("x").get<std::vector<double>>();
  m.y = j.at("y").get<std::vector<double>>();
  m.weights = j.at("weights").get<std::vector<double>>();
  if (m.x.size() != m.y.size() || m.x.size() != m.weights.size()) {
    throw Error(ErrorKind::Parse, "isotonic map arrays differ in length");
  }
  for (std::size_t i = 1; i < m.x.size(); ++i) {
    if (!(m.x[i] > m.x[i - 1]) || m.y[i] < m.y[i - 1]) {
      throw Error(ErrorKind::Parse, "isotonic map is not monotone");
    }
  }
  return m;
}

std::vector<double> pav(std::span<const double> y, std::span<const double> weights) {
  if (y.empty()) throw Error(ErrorKind::InvalidArgument, "isotonic regression of an empty sequence");
  if (!weights.empty() && weights.size() != y.size()) {
    throw Error(ErrorKind::InvalidArgument, "weights and values differ in length");
  }
  struct Block {
    double mean, weight;
    std::size_t len;
  };
  std::vector<Block> stack;
  stack.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "isotonic weights must be positive");
    if (!std::isfinite(y[i])) throw Error(ErrorKind::InvalidArgument, "non-finite value in isotonic input");
    Block b{y[i], w, 1};
    while (!stack.empty() && stack.back().mean > b.mean) {
      const Block& t = stack.back();
      const double tw = t.weight + b.weight;
      b = {(t.mean * t.weight + b.mean * b.weight) / tw, tw, t.len + b.len};
      stack.pop_back();
    }
    stack.push_back(b);
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& b : stack) out.insert(out.end(), b.len, b.mean);
  return out;
}

IsotonicMap fit_isotonic(std::span<const double> y, std::span<const double> weights) {
  IsotonicMap m;
  m.y = pav(y, weights);
  m.x.resize(y.size());
  std::iota(m.x.begin(), m.x.end(), 0.0);
  m.weights = weights.empty() ? std::vector<double>(y.size(), 1.0)
                              : std::vector<double>(weights.begin(), weights.end());
  return m;
}

IsotonicMap fit_isotonic(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
  if (x.size() != y.size() || (!weights.empty() && weights.size() != y.size())) {
    throw Error(ErrorKind::InvalidArgument, "isotonic inputs differ in length");
  }
  if (x.empty()) throw Error(ErrorKind::InvalidArgument, "isotonic regression of an empty sequence");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::vector<double> ux, uy, uw;
  for (std::size_t i : order) {
    if (!std::isfinite(x[i])) throw Error(ErrorKind::InvalidArgument, "non-finite isotonic abscissa");
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0)) throw Error(ErrorKind::InvalidArgument, "isotonic weights must be positive");
    if (!ux.empty() && ux.back() == x[i]) {
      const double tw = uw.back() + w;
      uy.back() = (uy.back() * uw.back() + y[i] * w) / tw;
      uw.back() = tw;
    } else {
      ux.push_back(x[i]);
      uy.push_back(y[i]);
      uw.push_back(w);
    }
  }
  IsotonicMap m;
  m.y = pav(uy, uw);
  m.x = std::move(ux);
  m.weights = std::move(uw);
  return m;
}

// ---- configuration ---------------------------------------------------------

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::GD: return "gd";
    case Algorithm::DT: return "dt";
    case Algorithm::RF: return "rf";
    case Algorithm::SVC: return "svc";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  std::string l(s);
  for (auto& c : l) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "gd") return Algorithm::GD;
  if (l == "dt") return Algorithm::DT;
  if (l == "rf") return Algorithm::RF;
  if (l == "svc") return Algorithm::SVC;
  throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + std::string(s) + "' (gd, dt, rf, svc)");
}

void TrainConfig::set(std::string_view name, const json& v) {
  if (name == "algorithm") {
    algorithm = parse_algorithm(v.get<std::string>());
  } else if (name == "seed") {
    seed = as_count(v, name);
  } else if (name == "learning_rate") {
    learning_rate = as_real(v, name);
  } else if (name == "epochs") {
    epochs = as_count(v, name);
  } else if (name == "l2") {
    l2 = as_real(v, name);
  } else if (name == "batch_size") {
    batch_size = as_count(v, name);
  } else if (name == "max_depth") {
    max_depth = v.is_null() ? 0 : as_count(v, name);
  } else if (name == "min_leaf") {
    min_leaf = as_count(v, name);
  } else if (name == "trees") {
    trees = as_count(v, name);
  } else if (name == "bootstrap") {
    if (!v.is_boolean()) throw Error(ErrorKind::InvalidArgument, "bootstrap must be true or false");
    bootstrap = v.get<bool>();
  } else if (name == "max_features") {
    max_features = v.is_null() ? 0 : as_count(v, name);
  } else if (name == "lambda") {
    lambda = as_real(v, name);
  } else if (name == "svc_epochs") {
    svc_epochs = as_count(v, name);
  } else if (name == "calibration_fraction") {
    calibration_fraction = as_real(v, name);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown training parameter '" + std::string(name) + "'");
  }
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, m); };
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
  if (epochs == 0) fail("epochs must be positive");
  if (!(l2 >= 0) || !std::isfinite(l2)) fail("l2 must be non-negative");
  if (min_leaf == 0) fail("min_leaf must be positive");
  if (trees == 0) fail("trees must be positive");
  if (!(lambda > 0) || !std::isfinite(lambda)) fail("lambda must be positive");
  if (svc_epochs == 0) fail("svc_epochs must be positive");
  if (!(calibration_fraction > 0 && calibration_fraction < 1)) fail("calibration_fraction must be in (0, 1)");
}

json TrainConfig::to_json() const {
  return {{"algorithm", algorithm_name(algorithm)},
          {"seed", seed},
          {"learning_rate", learning_rate},
          {"epochs", epochs},
          {"l2", l2},
          {"batch_size", batch_size},
          {"max_depth", max_depth},
          {"min_leaf", min_leaf},
          {"trees", trees},
          {"bootstrap", bootstrap},
          {"max_features", max_features},
          {"lambda", lambda},
          {"svc_epochs", svc_epochs},
          {"calibration_fraction", calibration_fraction}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  for (const auto& [k, v] : j.items()) c.set(k, v);
  c.validate();
  return c;
}

// ---- model base ------------------------------------------------------------

std::array<double, 2> ProbabilisticModel::predict_proba(std::span<const SparseEntry> row) const {
  for (const auto& e : row) {
    if (e.col >= width_) {
      throw Error(ErrorKind::InvalidArgument, "feature column " + std::to_string(e.col) +
                                                  " outside the model width " + std::to_string(width_));
    }
  }
  const double p = std::clamp(positive_probability(row), 0.0, 1.0);
  return {1.0 - p, p};
}

json ProbabilisticModel::to_json() const {
  return {{"format", "oppscreen.model"},
          {"version", kModelFormatVersion},
          {"algorithm", algorithm_name(algorithm())},
          {"width", width_},
          {"parameters", parameters_json()}};
}

// ---- logistic --------------------------------------------------------------

std::unique_ptr<LogisticModel> LogisticModel::train(const TrainConfig& cfg, const SparseMatrix& x,
                                                    std::span<const int> y) {
  cfg.validate();
  check_training_input(x, y);
  const SparseMatrix xn = normalized(x);
  const std::size_t n = xn.rows();
  const std::size_t d = xn.cols();

  auto m = std::make_unique<LogisticModel>();
  m->width_ = d;
  m->w_.assign(d, 0.0);

  auto loss = [&]() {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double z = dot(xn.row(r), m->w_) + m->b_;
      s += y[r] ? softplus_neg(z) : softplus_neg(-z);
    }
    double reg = 0.0;
    for (double v : m->w_) reg += v * v;
    return s / static_cast<double>(n) + 0.5 * cfg.l2 * reg;
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);
  Rng rng(derive_seed(cfg.seed, 0x6764));
  std::vector<double> grad(d);

  m->loss_history_.push_back(loss());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n) rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      double gb = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const auto row = xn.row(order[i]);
        const double err = sigmoid(dot(row, m->w_) + m->b_) - y[order[i]];
        for (const auto& e : row) grad[e.col] += err * e.value;
        gb += err;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (std::size_t c = 0; c < d; ++c) {
        m->w_[c] -= cfg.learning_rate * (grad[c] * inv + cfg.l2 * m->w_[c]);
      }
      m->b_ -= cfg.learning_rate * gb * inv;
    }
    m->loss_history_.push_back(loss());
  }
  return m;
}

double LogisticModel::positive_probability(std::span<const SparseEntry> row) const {
  return sigmoid(normalized_dot(row, w_) + b_);
}

json LogisticModel::parameters_json() const { return {{"weights", w_}, {"bias", b_}}; }

std::unique_ptr<LogisticModel> LogisticModel::from_json(const json& j, std::size_t width) {
  auto m = std::make_unique<LogisticModel>();
  m->width_ = width;
  m->w_ = j.at("weights").get<std::vector<double>>();
  m->b_ = j.at("bias").get<double>();
  if (m->w_.size() != width) throw Error(ErrorKind::Parse, "logistic weights do not match the model width");
  return m;
}

// ---- decision tree ---------------------------------------------------------

namespace {

struct TreeBuilder {
  const SparseMatrix& x;
  std::span<const int> y;
  std::vector<double> weight;
  std::size_t max_depth;
  std::size_t min_leaf;
  std::size_t subset;  // 0 = all
  Rng rng;
  std::vector<TreeNode> nodes;

  // per-column scratch, reset after every node
  std::vector<std::uint32_t> count;
  std::vector<double> lo, hi;
  std::vector<std::int32_t> slot;

  struct Item {
    double value;
    double w;
    int label;
  };

  TreeBuilder(const SparseMatrix& m, std::span<const int> labels, std::vector<double> w, std::size_t depth,
              std::size_t leaf, std::size_t sub, std::uint64_t seed)
      : x(m), y(labels), weight(std::move(w)), max_depth(depth), min_leaf(leaf), subset(sub), rng(seed),
        count(m.cols(), 0), lo(m.cols()), hi(m.cols()), slot(m.cols(), -1) {}

  std::int32_t build(std::vector<std::size_t>& rows, std::size_t depth) {
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t r : rows) (y[r] ? w1 : w0) += weight[r];
    const auto id = static_cast<std::int32_t>(nodes.size());
    nodes.push_back({});
    nodes[id].value = w1 / (w0 + w1);

    const bool pure = w0 == 0.0 || w1 == 0.0;
    if (pure || (max_depth != 0 && depth >= max_depth) || rows.size() < 2 * min_leaf) return id;

    // non-constant columns of this node
    std::vector<std::uint32_t> touched;
    for (std::size_t r : rows) {
      for (const auto& e : x.row(r)) {
        if (count[e.col]++ == 0) {
          touched.push_back(e.col);
          lo[e.col] = hi[e.col] = e.value;
        } else {
          lo[e.col] = std::min(lo[e.col], e.value);
          hi[e.col] = std::max(hi[e.col], e.value);
        }
      }
    }
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t c : touched) {
      if (count[c] < rows.size() || lo[c] != hi[c]) candidates.push_back(c);
      count[c] = 0;
    }
    std::sort(candidates.begin(), candidates.end());
    if (subset != 0 && subset < candidates.size()) {
      for (std::size_t i = 0; i < subset; ++i) {
        std::swap(candidates[i], candidates[i + rng.index(candidates.size() - i)]);
      }
      candidates.resize(subset);
      std::sort(candidates.begin(), candidates.end());
    }
    if (candidates.empty()) return id;

    for (std::size_t i = 0; i < candidates.size(); ++i) slot[candidates[i]] = static_cast<std::int32_t>(i);
    std::vector<std::vector<Item>> items(candidates.size());
    for (std::size_t r : rows) {
      for (const auto& e : x.row(r)) {
        if (slot[e.col] >= 0) items[static_cast<std::size_t>(slot[e.col])].push_back({e.value, weight[r], y[r]});
      }
    }
    for (std::uint32_t c : candidates) slot[c] = -1;

    auto gini_mass = [](double a, double b) {
      const double t = a + b;
      return t > 0 ? t - (a * a + b * b) / t : 0.0;  // t * gini
    };

    double best = std::numeric_limits<double>::infinity();
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      auto& its = items[ci];
      // zero group = rows without an entry
      double z0 = w0, z1 = w1;
      std::size_t zn = rows.size() - its.size();
      for (const auto& it : its) (it.label ? z1 : z0) -= it.w;
      if (zn > 0) its.push_back({0.0, 0.0, -1});
      std::sort(its.begin(), its.end(), [](const Item& a, const Item& b) { return a.value < b.value; });

      double l0 = 0.0, l1 = 0.0;
      std::size_t ln = 0;
      for (std::size_t i = 0; i < its.size();) {
        const double v = its[i].value;
        for (; i < its.size() && its[i].value == v; ++i) {
          if (its[i].label < 0) {
            l0 += z0;
            l1 += z1;
            ln += zn;
          } else {
            (its[i].label ? l1 : l0) += its[i].w;
            ++ln;
          }
        }
        if (i == its.size()) break;
        const std::size_t rn = rows.size() - ln;
        if (ln < min_leaf || rn < min_leaf) continue;
        const double impurity = gini_mass(l0, l1) + gini_mass(w0 - l0, w1 - l1);
        if (impurity < best) {
          best = impurity;
          best_feature = static_cast<std::int32_t>(candidates[ci]);
          best_threshold = v + (its[i].value - v) / 2.0;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      const auto row = x.row(r);
      const auto it = std::lower_bound(row.begin(), row.end(), static_cast<std::uint32_t>(best_feature),
                                       [](const SparseEntry& e, std::uint32_t c) { return e.col < c; });
      const double v = (it != row.end() && it->col == static_cast<std::uint32_t>(best_feature)) ? it->value : 0.0;
      (v <= best_threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    const auto l = build(left, depth + 1);
    nodes[id].left = l;
    const auto r = build(right, depth + 1);
    nodes[id].right = r;
    return id;
  }
};

double feature_value(std::span<const SparseEntry> row, std::uint32_t col) {
  const auto it = std::lower_bound(row.begin(), row.end(), col,
                                   [](const SparseEntry& e, std::uint32_t c) { return e.col < c; });
  return (it != row.end() && it->col == col) ? it->value : 0.0;
}

}  // namespace

std::unique_ptr<DecisionTree> DecisionTree::train(const TrainConfig& cfg, const SparseMatrix& x,
                                                  std::span<const int> y, std::span<const double> sample_weight,
                                                  std::size_t feature_subset, std::uint64_t rng_seed) {
  cfg.validate();
  check_training_input(x, y);
  std::vector<double> w(x.rows(), 1.0);
  if (!sample_weight.empty()) {
    if (sample_weight.size() != x.rows()) throw Error(ErrorKind::InvalidArgument, "sample weights differ in count");
    w.assign(sample_weight.begin(), sample_weight.end());
  }
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (w[r] < 0 || !std::isfinite(w[r])) throw Error(ErrorKind::InvalidArgument, "sample weights must be non-negative");
    if (w[r] > 0) rows.push_back(r);
  }
  if (rows.empty()) throw Error(ErrorKind::Training, "all sample weights are zero");

  TreeBuilder b(x, y, std::move(w), cfg.max_depth, cfg.min_leaf, feature_subset, rng_seed);
  b.build(rows, 0);
  auto t = std::make_unique<DecisionTree>();
  t->width_ = x.cols();
  t->nodes_ = std::move(b.nodes);
  return t;
}

double DecisionTree::positive_probability(std::span<const SparseEntry> row) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(feature_value(row, static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left
                                                                                                          : n.right);
  }
  return nodes_[i].value;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  // children always follow their parent in the array
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes_[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

json DecisionTree::parameters_json() const {
  std::vector<std::int32_t> feature, left, right;
  std::vector<double> threshold, value;
  for (const auto& n : nodes_) {
    feature.push_back(n.feature);
    left.push_back(n.left);
    right.push_back(n.right);
    threshold.push_back(n.threshold);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

std::unique_ptr<DecisionTree> DecisionTree::from_json(const json& j, std::size_t width) {
  const auto feature = j.at("feature").get<std::vector<std::int32_t>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<std::int32_t>>();
  const auto right = j.at("right").get<std::vector<std::int32_t>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) {
    throw Error(ErrorKind::Parse, "malformed tree arrays");
  }
  auto t = std::make_unique<DecisionTree>();
  t->width_ = width;
  for (std::size_t i = 0; i < n; ++i) {
    if (feature[i] >= 0) {
      const auto ok = [&](std::int32_t c) { return c > static_cast<std::int32_t>(i) && static_cast<std::size_t>(c) < n; };
      if (static_cast<std::size_t>(feature[i]) >= width || !ok(left[i]) || !ok(right[i])) {
        throw Error(ErrorKind::Parse, "malformed tree node " + std::to_string(i));
      }
    }
    t->nodes_.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
  }
  return t;
}

// ---- random forest ---------------------------------------------------------

std::unique_ptr<RandomForest> RandomForest::train(const TrainConfig& cfg, const SparseMatrix& x,
                                                  std::span<const int> y) {
  cfg.validate();
  check_training_input(x, y);
  const std::size_t n = x.rows();
  const std::size_t m = cfg.max_features != 0
                            ? cfg.max_features
                            : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(x.cols()))));
  auto f = std::make_unique<RandomForest>();
  f->width_ = x.cols();
  std::vector<double> w(n, 1.0);
  for (std::size_t t = 0; t < cfg.trees; ++t) {
    const std::uint64_t seed = derive_seed(cfg.seed, t);
    if (cfg.bootstrap) {
      Rng rng(derive_seed(seed, 0x626f6f74));
      std::fill(w.begin(), w.end(), 0.0);
      bool seen[2] = {false, false};
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = rng.index(n);
        w[r] += 1.0;
        seen[y[r]] = true;
      }
      if (!seen[0] || !seen[1]) {
        // single-class bag: the tree is a constant leaf
        auto leaf = std::make_unique<DecisionTree>();
        auto j = json{{"feature", {-1}}, {"threshold", {0.0}}, {"left", {-1}}, {"right", {-1}},
                      {"value", {seen[1] ? 1.0 : 0.0}}};
        f->trees_.push_back(DecisionTree::from_json(j, x.cols()));
        continue;
      }
    }
    f->trees_.push_back(DecisionTree::train(cfg, x, y, w, m >= x.cols() ? 0 : m, seed));
  }
  return f;
}

double RandomForest::positive_probability(std::span<const SparseEntry> row) const {
  double s = 0.0;
  for (const auto& t : trees_) s += t->positive_probability(row);
  return s / static_cast<double>(trees_.size());
}

json RandomForest::parameters_json() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(t->parameters_json());
  return {{"trees", trees}};
}

std::unique_ptr<RandomForest> RandomForest::from_json(const json& j, std::size_t width) {
  auto f = std::make_unique<RandomForest>();
  f->width_ = width;
  for (const auto& t : j.at("trees")) f->trees_.push_back(DecisionTree::from_json(t, width));
  if (f->trees_.empty()) throw Error(ErrorKind::Parse, "forest without trees");
  return f;
}

// ---- linear svc ------------------------------------------------------------

std::unique_ptr<SvcModel> SvcModel::train(const TrainConfig& cfg, const SparseMatrix& x, std::span<const int> y) {
  cfg.validate();
  check_training_input(x, y);
  const std::size_t n = x.rows();

  // stratified calibration holdout
  Rng split_rng(derive_seed(cfg.seed, 0x63616c));
  std::vector<std::size_t> fit_idx, cal_idx;
  bool holdout = true;
  std::vector<std::size_t> by_class[2];
  for (std::size_t r = 0; r < n; ++r) by_class[y[r]].push_back(r);
  std::size_t take[2];
  for (int c = 0; c < 2; ++c) {
    take[c] = static_cast<std::size_t>(std::llround(cfg.calibration_fraction * static_cast<double>(by_class[c].size())));
    if (take[c] == 0 || take[c] >= by_class[c].size()) holdout = false;
  }
  if (holdout) {
    for (int c = 0; c < 2; ++c) {
      split_rng.shuffle(by_class[c]);
      cal_idx.insert(cal_idx.end(), by_class[c].begin(), by_class[c].begin() + static_cast<std::ptrdiff_t>(take[c]));
      fit_idx.insert(fit_idx.end(), by_class[c].begin() + static_cast<std::ptrdiff_t>(take[c]), by_class[c].end());
    }
    std::sort(cal_idx.begin(), cal_idx.end());
    std::sort(fit_idx.begin(), fit_idx.end());
  } else {
    fit_idx.resize(n);
    std::iota(fit_idx.begin(), fit_idx.end(), 0);
    cal_idx = fit_idx;
  }

  const SparseMatrix xn = normalized(x);
  auto m = std::make_unique<SvcModel>();
  m->width_ = x.cols();
  std::vector<double> v(x.cols(), 0.0);
  double scale = 1.0;
  double b = 0.0;
  const double lambda = cfg.lambda;
  const double t0 = 1.0 / lambda;
  double t = 0.0;
  Rng rng(derive_seed(cfg.seed, 0x737663));
  std::vector<std::size_t> order = fit_idx;
  for (std::size_t epoch = 0; epoch < cfg.svc_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t r : order) {
      const double eta = 1.0 / (lambda * (t + t0));
      const double label = y[r] ? 1.0 : -1.0;
      const auto row = xn.row(r);
      const double z = scale * dot(row, v) + b;
      scale *= 1.0 - eta * lambda;
      if (label * z < 1.0) {
        const double step = eta * label / scale;
        for (const auto& e : row) v[e.col] += step * e.value;
        b += 0.01 * eta * label;
      }
      if (scale < 1e-9) {
        for (auto& c : v) c *= scale;
        scale = 1.0;
      }
      t += 1.0;
    }
  }
  for (auto& c : v) c *= scale;
  m->w_ = std::move(v);
  m->b_ = b;

  std::vector<double> margins, targets;
  for (std::size_t r : cal_idx) {
    margins.push_back(dot(xn.row(r), m->w_) + m->b_);
    targets.push_back(y[r]);
  }
  m->calibration_ = fit_isotonic(margins, targets, {});
  return m;
}

double SvcModel::margin(std::span<const SparseEntry> row) const { return normalized_dot(row, w_) + b_; }

double SvcModel::positive_probability(std::span<const SparseEntry> row) const {
  return std::clamp(calibration_(margin(row)), 0.0, 1.0);
}

json SvcModel::parameters_json() const {
  return {{"weights", w_}, {"bias", b_}, {"calibration", calibration_.to_json()}};
}

std::unique_ptr<SvcModel> SvcModel::from_json(const json& j, std::size_t width) {
  auto m = std::make_unique<SvcModel>();
  m->width_ = width;
  m->w_ = j.at("weights").get<std::vector<double>>();
  m->b_ = j.at("bias").get<double>();
  m->calibration_ = IsotonicMap::from_json(j.at("calibration"));
  if (m->w_.size() != width) throw Error(ErrorKind::Parse, "svc weights do not match the model width");
  if (m->calibration_.x.empty()) throw Error(ErrorKind::Parse, "svc calibration map is empty");
  return m;
}

// ---- factories -------------------------------------------------------------

std::unique_ptr<ProbabilisticModel> train_model(const TrainConfig& cfg, const SparseMatrix& x,
                                                std::span<const int> y) {
  switch (cfg.algorithm) {
    case Algorithm::GD: return LogisticModel::train(cfg, x, y);
    case Algorithm::DT: return DecisionTree::train(cfg, x, y);
    case Algorithm::RF: return RandomForest::train(cfg, x, y);
    case Algorithm::SVC: return SvcModel::train(cfg, x, y);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown algorithm");
}

std::unique_ptr<ProbabilisticModel> model_from_json(const json& j) {
  check_format(j, "oppscreen.model", kModelFormatVersion);
  try {
    const auto width = j.at("width").get<std::size_t>();
    const auto& p = j.at("parameters");
    switch (parse_algorithm(j.at("algorithm").get<std::string>())) {
      case Algorithm::GD: return LogisticModel::from_json(p, width);
      case Algorithm::DT: return DecisionTree::from_json(p, width);
      case Algorithm::RF: return RandomForest::from_json(p, width);
      case Algorithm::SVC: return SvcModel::from_json(p, width);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed model: ") + e.what());
  }
  throw Error(ErrorKind::Parse, "malformed model");
}

// ---- grid search -----------------------------------------------------------

ParamGrid default_vectorizer_grid() {
  ParamGrid g;
  g["max_df"] = {0.3, 0.35, 0.4, 0.5, 0.7, 0.8, 1};
  g["min_df"] = {0, 0.001, 0.005, 0.008, 0.01};
  // (1,4) appears twice in the published grid; kept as is
  for (int hi : {1, 2, 3, 4, 4, 5, 6, 7}) g["ngram_range"].push_back(json::array({1, hi}));
  g["max_features"] = {10000, 20000, 30000, nullptr};
  return g;
}

std::vector<json> grid_cells(const ParamGrid& grid) {
  std::vector<json> cells{json::object()};
  for (const auto& [name, values] : grid) {
    if (values.empty()) throw Error(ErrorKind::InvalidArgument, "grid parameter '" + name + "' has no values");
    std::vector<json> next;
    next.reserve(cells.size() * values.size());
    for (const auto& c : cells) {
      for (const auto& v : values) {
        json n = c;
        n[name] = v;
        next.push_back(std::move(n));
      }
    }
    cells = std::move(next);
  }
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty parameter grid");
  return cells;
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Accuracy: return "accuracy";
    case Metric::Precision: return "precision";
    case Metric::F1: return "f1";
  }
  return "?";
}

Metric parse_metric(std::string_view s) {
  if (s == "accuracy") return Metric::Accuracy;
  if (s == "precision") return Metric::Precision;
  if (s == "f1") return Metric::F1;
  throw Error(ErrorKind::InvalidArgument, "unknown metric '" + std::string(s) + "' (accuracy, precision, f1)");
}

double score_predictions(Metric m, std::span<const int> gold, std::span<const int> predicted) {
  if (gold.size() != predicted.size()) throw Error(ErrorKind::InvalidArgument, "gold and predicted differ in length");
  if (gold.empty()) return 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    correct += gold[i] == predicted[i];
    if (predicted[i] == 1) (gold[i] == 1 ? tp : fp)++;
    else if (gold[i] == 1) ++fn;
  }
  switch (m) {
    case Metric::Accuracy: return static_cast<double>(correct) / static_cast<double>(gold.size());
    case Metric::Precision: return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    case Metric::F1: return tp ? 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn) : 0.0;
  }
  return 0.0;
}

void apply_cell(const json& cell, FeaturePipelineConfig& features, TrainConfig& train) {
  for (const auto& [k, v] : cell.items()) {
    if (k == "max_df" || k == "min_df" || k == "ngram_range" || k == "max_features") {
      for (GramConfig* g : {&features.chars, &features.char_words, &features.words}) {
        if (k == "max_df") {
          g->max_df = as_real(v, k);
        } else if (k == "min_df") {
          g->min_df = as_real(v, k);
        } else if (k == "ngram_range") {
          if (!v.is_array() || v.size() != 2) throw Error(ErrorKind::InvalidArgument, "ngram_range must be [min, max]");
          g->ngram_min = as_count(v[0], k);
          g->ngram_max = as_count(v[1], k);
        } else {
          g->max_features = v.is_null() ? std::nullopt : std::optional<std::size_t>(as_count(v, k));
        }
      }
    } else if (k == "percentile") {
      features.percentile = static_cast<int>(as_count(v, k));
    } else if (k == "use_dense") {
      features.use_dense = v.get<bool>();
    } else {
      train.set(k, v);
    }
  }
}

GridSearchResult grid_search(std::span<const ProcessedTweet> tweets, std::span<const int> labels,
                             const FeaturePipelineConfig& features, const TrainConfig& train,
                             const ParamGrid& grid, std::size_t folds, Metric metric,
                             const SentimentLexicons& lexicons) {
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "grid search needs at least two folds");
  if (tweets.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "labels and tweets differ in count");
  const auto cells = grid_cells(grid);

  std::vector<LabeledId> ids;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw Error(ErrorKind::InvalidArgument, "labels must be 0 or 1");
    ids.push_back({static_cast<std::int64_t>(i), kAllLabels[static_cast<std::size_t>(labels[i])]});
  }
  const FoldAssignment split = stratified_folds(ids, folds, train.seed);

  GridSearchResult out;
  bool have_best = false;
  for (const auto& cell : cells) {
    FeaturePipelineConfig fc = features;
    TrainConfig tc = train;
    std::vector<double> scores;
    for (std::size_t f = 0; f < folds; ++f) {
      try {
        apply_cell(cell, fc, tc);
        std::vector<ProcessedTweet> tr, te;
        std::vector<int> ytr, yte;
        for (std::size_t i = 0; i < tweets.size(); ++i) {
          const bool test = split.assignment.at(static_cast<std::int64_t>(i)) == f;
          (test ? te : tr).push_back(tweets[i]);
          (test ? yte : ytr).push_back(labels[i]);
        }
        SparseMatrix x;
        const auto lf = LayerFeatures::fit(tr, ytr, fc, lexicons, &x);
        const auto model = train_model(tc, x, ytr);
        std::vector<int> pred;
        for (const auto& t : te) {
          const auto p = model->predict_proba(lf.row(t, lexicons));
          pred.push_back(p[1] > p[0] ? 1 : 0);
        }
        scores.push_back(score_predictions(metric, yte, pred));
      } catch (const Error& e) {
        throw Error(e.kind(), "grid cell " + cell.dump() + ", fold " + std::to_string(f + 1) + ": " + e.what());
      }
    }
    const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
    if (!have_best || mean > out.best_score) {
      out.best = cell;
      out.best_score = mean;
      have_best = true;
    }
    out.cells.emplace_back(cell, std::move(scores));
  }
  return out;
}

}  // namespace oppscreen
