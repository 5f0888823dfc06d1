#include "core/features.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/text.hpp"

namespace oppscreen {

using nlohmann::json;

namespace {

void append_char_grams(const std::u32string& s, std::size_t lo, std::size_t hi,
                       std::vector<std::string>& out) {
  for (std::size_t n = lo; n <= hi && n <= s.size(); ++n) {
    for (std::size_t i = 0; i + n <= s.size(); ++i) out.push_back(text::encode(s.substr(i, n)));
  }
}

void check_version(const json& j, std::string_view format) {
  if (!j.is_object() || j.value("format", "") != format) {
    throw Error(ErrorKind::Parse, "not a " + std::string(format) + " document");
  }
  if (j.value("version", -1) != kFeatureFormatVersion) {
    throw Error(ErrorKind::Version, std::string(format) + " version " +
                                        std::to_string(j.value("version", -1)) + " unsupported");
  }
}

std::vector<std::pair<std::string, std::string>> read_tsv_pairs(std::string_view content,
                                                                std::string_view source) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorKind::Parse, std::string(source) + ":" + std::to_string(n) + ": expected two columns");
    }
    rows.emplace_back(text::fold(text::trim(t.substr(0, tab))), text::trim(t.substr(tab + 1)));
  }
  return rows;
}

}  // namespace

std::string_view analyzer_name(Analyzer a) {
  switch (a) {
    case Analyzer::Char: return "char";
    case Analyzer::CharWordBoundary: return "char_word_boundary";
    case Analyzer::Word: return "word";
  }
  return "word";
}

Analyzer parse_analyzer(std::string_view s) {
  if (s == "char") return Analyzer::Char;
  if (s == "char_word_boundary" || s == "char_wb") return Analyzer::CharWordBoundary;
  if (s == "word") return Analyzer::Word;
  throw Error(ErrorKind::InvalidArgument, "unknown analyzer '" + std::string(s) + "'");
}

void GramConfig::validate() const {
  if (ngram_min < 1 || ngram_min > ngram_max) {
    throw Error(ErrorKind::InvalidArgument, "ngram_range must satisfy 1 <= min <= max");
  }
  if (!(min_df >= 0.0 && min_df <= max_df && max_df <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "document frequency bounds must satisfy 0 <= min_df <= max_df <= 1");
  }
  if (max_features && *max_features == 0) {
    throw Error(ErrorKind::InvalidArgument, "max_features must be positive");
  }
}

std::vector<std::string> extract_grams(const std::vector<std::string>& tokens, const GramConfig& cfg) {
  std::vector<std::string> out;
  switch (cfg.analyzer) {
    case Analyzer::Char:
      append_char_grams(text::decode(text::join(tokens, " ")), cfg.ngram_min, cfg.ngram_max, out);
      break;
    case Analyzer::CharWordBoundary:
      for (const auto& t : tokens) {
        append_char_grams(U" " + text::decode(t) + U" ", cfg.ngram_min, cfg.ngram_max, out);
      }
      break;
    case Analyzer::Word:
      for (std::size_t n = cfg.ngram_min; n <= cfg.ngram_max && n <= tokens.size(); ++n) {
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
          std::string g = tokens[i];
          for (std::size_t k = 1; k < n; ++k) {
            g += ' ';
            g += tokens[i + k];
          }
          out.push_back(std::move(g));
        }
      }
      break;
  }
  return out;
}

Vocabulary Vocabulary::fit(std::span<const ProcessedTweet> corpus, const GramConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw Error(ErrorKind::InvalidArgument, "cannot fit a vocabulary on an empty corpus");

  struct Stat {
    std::uint32_t df = 0;
    std::uint64_t total = 0;
  };
  std::unordered_map<std::string, Stat> stats;
  for (const auto& doc : corpus) {
    auto grams = extract_grams(doc.tokens, cfg);
    std::sort(grams.begin(), grams.end());
    for (std::size_t i = 0; i < grams.size();) {
      std::size_t j = i + 1;
      while (j < grams.size() && grams[j] == grams[i]) ++j;
      Stat& s = stats[grams[i]];
      s.df += 1;
      s.total += j - i;
      i = j;
    }
  }

  const double n = static_cast<double>(corpus.size());
  std::vector<std::pair<std::string, Stat>> kept;
  for (auto& [g, s] : stats) {
    const double df = s.df;
    if (df >= cfg.min_df * n && df <= cfg.max_df * n) kept.emplace_back(g, s);
  }
  if (cfg.max_features && kept.size() > *cfg.max_features) {
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      if (a.second.total != b.second.total) return a.second.total > b.second.total;
      return a.first < b.first;
    });
    kept.resize(*cfg.max_features);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  Vocabulary v;
  v.config_ = cfg;
  v.documents_ = corpus.size();
  v.grams_.reserve(kept.size());
  v.df_.reserve(kept.size());
  for (auto& [g, s] : kept) {
    v.grams_.push_back(g);
    v.df_.push_back(s.df);
  }
  v.rebuild_index();
  return v;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  index_.reserve(grams_.size());
  for (std::size_t i = 0; i < grams_.size(); ++i) index_.emplace(grams_[i], static_cast<std::uint32_t>(i));
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view gram) const {
  auto it = index_.find(std::string(gram));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> Vocabulary::count(
    const std::vector<std::string>& tokens) const {
  std::vector<std::uint32_t> hits;
  if (grams_.empty()) return {};
  for (const auto& g : extract_grams(tokens, config_)) {
    if (auto it = index_.find(g); it != index_.end()) hits.push_back(it->second);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t h : hits) {
    if (!out.empty() && out.back().first == h) {
      ++out.back().second;
    } else {
      out.emplace_back(h, 1);
    }
  }
  return out;
}

json Vocabulary::to_json() const {
  json grams = json::array();
  for (std::size_t i = 0; i < grams_.size(); ++i) grams.push_back(json::array({grams_[i], i, df_[i]}));
  return json{{"analyzer", analyzer_name(config_.analyzer)},
              {"ngram_range", {config_.ngram_min, config_.ngram_max}},
              {"max_df", config_.max_df},
              {"min_df", config_.min_df},
              {"max_features", config_.max_features ? json(*config_.max_features) : json(nullptr)},
              {"documents", documents_},
              {"grams", std::move(grams)}};
}

Vocabulary Vocabulary::from_json(const json& j) {
  try {
    Vocabulary v;
    v.config_.analyzer = parse_analyzer(j.at("analyzer").get<std::string>());
    v.config_.ngram_min = j.at("ngram_range").at(0).get<std::size_t>();
    v.config_.ngram_max = j.at("ngram_range").at(1).get<std::size_t>();
    v.config_.max_df = j.at("max_df").get<double>();
    v.config_.min_df = j.at("min_df").get<double>();
    if (!j.at("max_features").is_null()) v.config_.max_features = j.at("max_features").get<std::size_t>();
    v.documents_ = j.at("documents").get<std::size_t>();
    for (const auto& g : j.at("grams")) {
      if (g.at(1).get<std::size_t>() != v.grams_.size()) {
        throw Error(ErrorKind::Parse, "vocabulary indices must be dense and ordered");
      }
      v.grams_.push_back(g.at(0).get<std::string>());
      v.df_.push_back(g.at(2).get<std::uint32_t>());
    }
    v.rebuild_index();
    return v;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("bad vocabulary: ") + e.what());
  }
}

std::string_view dense_feature_name(DenseFeature f) {
  static constexpr std::array<std::string_view, kDenseWidth> kNames = {
      "NEG_NUM",        "POS_NUM",           "NEG_PERC",         "POS_PERC",
      "HASHTAG",        "EXCLAMATION",       "INTERROGATION",    "ADVERBS",
      "NEG_POLARITY",   "NEU_POLARITY",      "POS_POLARITY",     "SADNESS_EMOTION",
      "HAPPINESS_EMOTION", "NEG_EMOJI",      "POS_EMOJI",        "NEG_AWARENESS_EMOJI",
      "POS_STATEMENT_EMOJI", "OPPORTUNITY_EMOJI", "PAST",        "PRESENT",
      "FUTURE",         "CONDITIONAL"};
  return kNames[static_cast<std::size_t>(f)];
}

SentimentLexicons SentimentLexicons::parse(std::string_view polarity_tsv, std::string_view emotion_tsv,
                                           std::string_view emoji_tsv, std::string_view adverbs_list) {
  SentimentLexicons lex;
  for (auto& [word, cat] : read_tsv_pairs(polarity_tsv, "polarity")) {
    if (cat == "negative") {
      lex.polarity[word] = Polarity::Negative;
    } else if (cat == "neutral") {
      lex.polarity[word] = Polarity::Neutral;
    } else if (cat == "positive") {
      lex.polarity[word] = Polarity::Positive;
    } else {
      throw Error(ErrorKind::Parse, "polarity: unknown category '" + cat + "' for '" + word + "'");
    }
  }
  for (auto& [word, cat] : read_tsv_pairs(emotion_tsv, "emotion")) {
    if (cat == "sadness") {
      lex.emotion[word] = Emotion::Sadness;
    } else if (cat == "happiness") {
      lex.emotion[word] = Emotion::Happiness;
    } else {
      throw Error(ErrorKind::Parse, "emotion: unknown category '" + cat + "' for '" + word + "'");
    }
  }
  for (auto& [name, cats] : read_tsv_pairs(emoji_tsv, "emoji")) {
    std::uint8_t flags = 0;
    std::istringstream in(cats);
    std::string c;
    while (std::getline(in, c, ',')) {
      c = text::trim(c);
      if (c == "negative") {
        flags |= kEmojiNegative;
      } else if (c == "positive") {
        flags |= kEmojiPositive;
      } else if (c == "negative_awareness") {
        flags |= kEmojiNegativeAwareness;
      } else if (c == "positive_statement") {
        flags |= kEmojiPositiveStatement;
      } else if (c == "opportunity") {
        flags |= kEmojiOpportunity;
      } else {
        throw Error(ErrorKind::Parse, "emoji: unknown category '" + c + "' for '" + name + "'");
      }
    }
    lex.emoji[name] = flags;
  }
  std::istringstream in{std::string(adverbs_list)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = text::trim(line);
    if (!t.empty() && t[0] != '#') lex.adverbs.insert(t);
  }
  return lex;
}

SentimentLexicons SentimentLexicons::load(const std::filesystem::path& polarity,
                                          const std::filesystem::path& emotion,
                                          const std::filesystem::path& emoji,
                                          const std::filesystem::path& adverbs) {
  return parse(io::read_file(polarity), io::read_file(emotion), io::read_file(emoji),
               io::read_file(adverbs));
}

bool is_adverb(std::string_view token, const WordSet& adverbs) {
  constexpr std::string_view kSuffix = "mente";
  if (token.size() > kSuffix.size() + 1 && token.substr(token.size() - kSuffix.size()) == kSuffix) {
    return true;
  }
  return adverbs.contains(token);
}

FeatureSpace FeatureSpace::fit(std::span<const ProcessedTweet> corpus, const GramConfig& chars_cfg,
                               const GramConfig& char_words_cfg, const GramConfig& words_cfg) {
  FeatureSpace s;
  s.chars = Vocabulary::fit(corpus, chars_cfg);
  s.char_words = Vocabulary::fit(corpus, char_words_cfg);
  s.words = Vocabulary::fit(corpus, words_cfg);
  return s;
}

json FeatureSpace::to_json() const {
  return json{{"format", "oppscreen.feature_space"},
              {"version", kFeatureFormatVersion},
              {"families", json::array({chars.to_json(), char_words.to_json(), words.to_json()})}};
}

FeatureSpace FeatureSpace::from_json(const json& j) {
  check_version(j, "oppscreen.feature_space");
  const auto& fam = j.at("families");
  if (!fam.is_array() || fam.size() != 3) throw Error(ErrorKind::Parse, "feature space needs three families");
  FeatureSpace s;
  s.chars = Vocabulary::from_json(fam[0]);
  s.char_words = Vocabulary::from_json(fam[1]);
  s.words = Vocabulary::from_json(fam[2]);
  return s;
}

std::array<std::uint32_t, kDenseWidth> dense_counters(const ProcessedTweet& tweet,
                                                      const SentimentLexicons& lex) {
  std::array<std::uint32_t, kDenseWidth> d{};
  auto bump = [&](DenseFeature f) { ++d[static_cast<std::size_t>(f)]; };
  for (QuantityTag q : tweet.quantity_tags) {
    switch (q) {
      case QuantityTag::Minus: bump(DenseFeature::NegNum); break;
      case QuantityTag::Plus: bump(DenseFeature::PosNum); break;
      case QuantityTag::MinusPct: bump(DenseFeature::NegPerc); break;
      case QuantityTag::PlusPct: bump(DenseFeature::PosPerc); break;
    }
  }
  d[static_cast<std::size_t>(DenseFeature::Hashtag)] = static_cast<std::uint32_t>(tweet.hashtags.size());
  d[static_cast<std::size_t>(DenseFeature::Exclamation)] = tweet.exclamation_count;
  d[static_cast<std::size_t>(DenseFeature::Interrogation)] = tweet.interrogation_count;
  for (const auto& t : tweet.tokens) {
    if (is_reserved_token(t)) continue;
    if (is_adverb(t, lex.adverbs)) bump(DenseFeature::Adverbs);
    if (auto it = lex.polarity.find(t); it != lex.polarity.end()) {
      bump(it->second == Polarity::Negative  ? DenseFeature::NegPolarity
           : it->second == Polarity::Neutral ? DenseFeature::NeuPolarity
                                             : DenseFeature::PosPolarity);
    }
    if (auto it = lex.emotion.find(t); it != lex.emotion.end()) {
      bump(it->second == Emotion::Sadness ? DenseFeature::SadnessEmotion : DenseFeature::HappinessEmotion);
    }
  }
  for (const auto& e : tweet.emojis) {
    auto it = lex.emoji.find(e);
    if (it == lex.emoji.end()) continue;
    const std::uint8_t f = it->second;
    if (f & kEmojiNegative) bump(DenseFeature::NegEmoji);
    if (f & kEmojiPositive) bump(DenseFeature::PosEmoji);
    if (f & kEmojiNegativeAwareness) bump(DenseFeature::NegAwarenessEmoji);
    if (f & kEmojiPositiveStatement) bump(DenseFeature::PosStatementEmoji);
    if (f & kEmojiOpportunity) bump(DenseFeature::OpportunityEmoji);
  }
  d[static_cast<std::size_t>(DenseFeature::Past)] = tweet.tense_counts[static_cast<std::size_t>(Tense::Past)];
  d[static_cast<std::size_t>(DenseFeature::Present)] = tweet.tense_counts[static_cast<std::size_t>(Tense::Present)];
  d[static_cast<std::size_t>(DenseFeature::Future)] = tweet.tense_counts[static_cast<std::size_t>(Tense::Future)];
  d[static_cast<std::size_t>(DenseFeature::Conditional)] =
      tweet.tense_counts[static_cast<std::size_t>(Tense::Conditional)];
  return d;
}

FeatureVector vectorize(const ProcessedTweet& tweet, const FeatureSpace& space,
                        const SentimentLexicons& lex) {
  FeatureVector v;
  std::uint32_t offset = 0;
  for (const Vocabulary* voc : {&space.chars, &space.char_words, &space.words}) {
    for (auto [col, n] : voc->count(tweet.tokens)) v.sparse.emplace_back(offset + col, n);
    offset += static_cast<std::uint32_t>(voc->size());
  }
  v.dense = dense_counters(tweet, lex);
  return v;
}

std::vector<std::int32_t> SelectionMask::remap() const {
  std::vector<std::int32_t> m(columns, -1);
  for (std::size_t i = 0; i < retained.size(); ++i) m[retained[i]] = static_cast<std::int32_t>(i);
  return m;
}

json SelectionMask::to_json() const {
  return json{{"format", "oppscreen.selection_mask"},
              {"version", kFeatureFormatVersion},
              {"percentile", percentile},
              {"columns", columns},
              {"retained", retained},
              {"scores", scores}};
}

SelectionMask SelectionMask::from_json(const json& j) {
  check_version(j, "oppscreen.selection_mask");
  try {
    SelectionMask m;
    m.percentile = j.at("percentile").get<int>();
    m.columns = j.at("columns").get<std::size_t>();
    m.retained = j.at("retained").get<std::vector<std::uint32_t>>();
    m.scores = j.at("scores").get<std::vector<double>>();
    for (std::size_t i = 0; i < m.retained.size(); ++i) {
      if (m.retained[i] >= m.columns || (i > 0 && m.retained[i] <= m.retained[i - 1])) {
        throw Error(ErrorKind::Parse, "mask columns must be ascending and in range");
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("bad selection mask: ") + e.what());
  }
}

SelectionMask select_percentile(std::span<const double> scores, int percentile) {
  if (percentile <= 0 || percentile > 100) {
    throw Error(ErrorKind::InvalidArgument, "percentile must be in (0, 100]");
  }
  const std::size_t n = scores.size();
  const std::size_t keep = (static_cast<std::size_t>(percentile) * n + 99) / 100;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return scores[a] > scores[b]; });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  SelectionMask m;
  m.columns = n;
  m.retained = std::move(order);
  m.scores.assign(scores.begin(), scores.end());
  m.percentile = percentile;
  return m;
}

FeatureVector apply_mask(const FeatureVector& v, const SelectionMask& mask) {
  const auto remap = mask.remap();
  FeatureVector out;
  out.dense = v.dense;
  for (auto [col, n] : v.sparse) {
    if (col < remap.size() && remap[col] >= 0) out.sparse.emplace_back(static_cast<std::uint32_t>(remap[col]), n);
  }
  return out;
}

FeatureVector vectorize(const ProcessedTweet& tweet, const FeatureSpace& space,
                        const SentimentLexicons& lex, const SelectionMask& mask) {
  if (mask.columns != space.gram_width()) {
    throw Error(ErrorKind::InvalidArgument, "selection mask width does not match the feature space");
  }
  FeatureVector v;
  std::uint32_t offset = 0;
  std::size_t cursor = 0;  // retained is ascending, so a merge walk suffices
  for (const Vocabulary* voc : {&space.chars, &space.char_words, &space.words}) {
    for (auto [col, n] : voc->count(tweet.tokens)) {
      const std::uint32_t g = offset + col;
      while (cursor < mask.retained.size() && mask.retained[cursor] < g) ++cursor;
      if (cursor < mask.retained.size() && mask.retained[cursor] == g) {
        v.sparse.emplace_back(static_cast<std::uint32_t>(cursor), n);
      }
    }
    offset += static_cast<std::uint32_t>(voc->size());
  }
  v.dense = dense_counters(tweet, lex);
  return v;
}

std::vector<double> chi2_scores(const SparseMatrix& x, std::span<const int> classes,
                                std::size_t class_count) {
  if (classes.size() != x.rows()) throw Error(ErrorKind::InvalidArgument, "label count does not match rows");
  std::vector<double> class_rows(class_count, 0.0);
  for (int c : classes) {
    if (c < 0 || static_cast<std::size_t>(c) >= class_count) {
      throw Error(ErrorKind::InvalidArgument, "class index out of range");
    }
    class_rows[static_cast<std::size_t>(c)] += 1.0;
  }
  const auto present = std::count_if(class_rows.begin(), class_rows.end(), [](double n) { return n > 0; });
  if (present < 2) throw Error(ErrorKind::InvalidArgument, "chi2 needs at least two classes");

  const std::size_t cols = x.cols();
  std::vector<double> observed(class_count * cols, 0.0);
  std::vector<double> col_sum(cols, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::size_t c = static_cast<std::size_t>(classes[r]);
    for (const auto& e : x.row(r)) {
      observed[c * cols + e.col] += e.value;
      col_sum[e.col] += e.value;
    }
  }
  const double n = static_cast<double>(x.rows());
  std::vector<double> scores(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_sum[j] == 0.0) continue;
    double s = 0.0;
    for (std::size_t c = 0; c < class_count; ++c) {
      if (class_rows[c] == 0.0) continue;
      const double expected = class_rows[c] / n * col_sum[j];
      const double diff = observed[c * cols + j] - expected;
      s += diff * diff / expected;
    }
    scores[j] = s;
  }
  return scores;
}

std::vector<double> chi2_scores(std::span<const FeatureVector> rows, std::size_t gram_width,
                                std::span<const EmotionLabel> labels) {
  SparseMatrix x(gram_width);
  SparseRow buf;
  for (const auto& v : rows) {
    buf.clear();
    for (auto [col, n] : v.sparse) {
      if (col < gram_width) buf.push_back({col, static_cast<double>(n)});
    }
    x.add_row(buf);
  }
  std::vector<int> classes;
  classes.reserve(labels.size());
  for (EmotionLabel l : labels) classes.push_back(static_cast<int>(index_of(l)));
  return chi2_scores(x, classes, kLabelCount);
}

SparseRow design_row(const FeatureVector& v, std::size_t gram_width, bool with_dense) {
  SparseRow row;
  row.reserve(v.sparse.size() + kDenseWidth);
  for (auto [col, n] : v.sparse) row.push_back({col, static_cast<double>(n)});
  if (!with_dense) return row;
  for (std::size_t d = 0; d < kDenseWidth; ++d) {
    if (v.dense[d] != 0) row.push_back({static_cast<std::uint32_t>(gram_width + d), static_cast<double>(v.dense[d])});
  }
  return row;
}

SparseMatrix design_matrix(std::span<const FeatureVector> rows, std::size_t gram_width,
                           bool with_dense) {
  SparseMatrix x(gram_width + kDenseWidth);
  for (const auto& v : rows) x.add_row(design_row(v, gram_width, with_dense));
  return x;
}

void FeaturePipelineConfig::validate() const {
  chars.validate();
  char_words.validate();
  words.validate();
  if (chars.analyzer != Analyzer::Char || char_words.analyzer != Analyzer::CharWordBoundary ||
      words.analyzer != Analyzer::Word) {
    throw Error(ErrorKind::InvalidArgument, "gram families must use the char, char_word_boundary and word analyzers");
  }
  if (percentile <= 0 || percentile > 100) throw Error(ErrorKind::InvalidArgument, "percentile must be in (0, 100]");
}

LayerFeatures LayerFeatures::fit(std::span<const ProcessedTweet> tweets, std::span<const int> labels,
                                 const FeaturePipelineConfig& cfg, const SentimentLexicons& lex,
                                 SparseMatrix* design, std::size_t classes) {
  cfg.validate();
  if (tweets.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "label count does not match tweets");
  LayerFeatures lf;
  lf.use_dense = cfg.use_dense;
  lf.space = FeatureSpace::fit(tweets, cfg.chars, cfg.char_words, cfg.words);
  const std::size_t width = lf.space.gram_width();

  std::vector<FeatureVector> full;
  full.reserve(tweets.size());
  SparseMatrix grams(width);
  SparseRow buf;
  for (const auto& t : tweets) {
    full.push_back(vectorize(t, lf.space, lex));
    buf.clear();
    for (auto [col, n] : full.back().sparse) buf.push_back({col, static_cast<double>(n)});
    grams.add_row(buf);
  }
  const auto scores = chi2_scores(grams, labels, classes);
  lf.mask = select_percentile(scores, cfg.percentile);

  if (design) {
    const auto remap = lf.mask.remap();
    SparseMatrix x(lf.width());
    for (auto& v : full) {
      FeatureVector m;
      m.dense = v.dense;
      for (auto [col, n] : v.sparse) {
        if (remap[col] >= 0) m.sparse.emplace_back(static_cast<std::uint32_t>(remap[col]), n);
      }
      x.add_row(design_row(m, lf.mask.retained.size(), lf.use_dense));
    }
    *design = std::move(x);
  }
  return lf;
}

SparseRow LayerFeatures::row(const ProcessedTweet& tweet, const SentimentLexicons& lex) const {
  return design_row(vectorize(tweet, space, lex, mask), mask.retained.size(), use_dense);
}

SparseMatrix LayerFeatures::matrix(std::span<const ProcessedTweet> tweets, const SentimentLexicons& lex) const {
  SparseMatrix x(width());
  for (const auto& t : tweets) x.add_row(row(t, lex));
  return x;
}

}  // namespace oppscreen
