#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/labels.hpp"
#include "core/lexicon.hpp"
#include "core/preprocess.hpp"
#include "core/sparse.hpp"
#include "json.hpp"

namespace oppscreen {

enum class Analyzer : std::uint8_t { Char, CharWordBoundary, Word };

std::string_view analyzer_name(Analyzer a);
Analyzer parse_analyzer(std::string_view s);

struct GramConfig {
  Analyzer analyzer = Analyzer::Word;
  std::size_t ngram_min = 1;
  std::size_t ngram_max = 7;
  double max_df = 0.5;
  double min_df = 0.001;
  std::optional<std::size_t> max_features;

  static GramConfig of(Analyzer a) {
    GramConfig g;
    g.analyzer = a;
    return g;
  }

  void validate() const;
  bool operator==(const GramConfig&) const = default;
};

// Every gram of the document, with repetitions.
//  char: code-point n-grams over the tokens joined by single spaces
//  char_word_boundary: n-grams inside each token padded with one space per side
//  word: token n-grams joined by single spaces
std::vector<std::string> extract_grams(const std::vector<std::string>& tokens, const GramConfig& cfg);

class Vocabulary {
 public:
  static Vocabulary fit(std::span<const ProcessedTweet> corpus, const GramConfig& cfg);

  const GramConfig& config() const { return config_; }
  std::size_t size() const { return grams_.size(); }
  std::size_t documents() const { return documents_; }
  const std::string& gram(std::size_t i) const { return grams_[i]; }
  std::uint32_t df(std::size_t i) const { return df_[i]; }
  std::optional<std::uint32_t> find(std::string_view gram) const;

  // (column, count) pairs sorted by column.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> count(const std::vector<std::string>& tokens) const;

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

  bool operator==(const Vocabulary& o) const {
    return config_ == o.config_ && grams_ == o.grams_ && df_ == o.df_ && documents_ == o.documents_;
  }

 private:
  void rebuild_index();

  GramConfig config_;
  std::vector<std::string> grams_;  // sorted; position is the column index
  std::vector<std::uint32_t> df_;
  std::size_t documents_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Dense counters, in this fixed order after the n-gram block.
enum class DenseFeature : std::uint8_t {
  NegNum, PosNum, NegPerc, PosPerc, Hashtag, Exclamation, Interrogation, Adverbs,
  NegPolarity, NeuPolarity, PosPolarity, SadnessEmotion, HappinessEmotion,
  NegEmoji, PosEmoji, NegAwarenessEmoji, PosStatementEmoji, OpportunityEmoji,
  Past, Present, Future, Conditional,
};

inline constexpr std::size_t kDenseWidth = 22;

std::string_view dense_feature_name(DenseFeature f);

enum class Polarity : std::uint8_t { Negative, Neutral, Positive };
enum class Emotion : std::uint8_t { Sadness, Happiness };

// Bit flags for emoji categories.
enum EmojiCategory : std::uint8_t {
  kEmojiNegative = 1,
  kEmojiPositive = 2,
  kEmojiNegativeAwareness = 4,
  kEmojiPositiveStatement = 8,
  kEmojiOpportunity = 16,
};

struct SentimentLexicons {
  std::unordered_map<std::string, Polarity> polarity;
  std::unordered_map<std::string, Emotion> emotion;
  std::unordered_map<std::string, std::uint8_t> emoji;
  WordSet adverbs;

  static SentimentLexicons parse(std::string_view polarity_tsv, std::string_view emotion_tsv,
                                 std::string_view emoji_tsv, std::string_view adverbs_list);
  static SentimentLexicons load(const std::filesystem::path& polarity,
                                const std::filesystem::path& emotion,
                                const std::filesystem::path& emoji,
                                const std::filesystem::path& adverbs);
};

bool is_adverb(std::string_view token, const WordSet& adverbs);

// The three gram families share one concatenated index space:
// char columns first, then char_word_boundary, then word.
struct FeatureSpace {
  Vocabulary chars;
  Vocabulary char_words;
  Vocabulary words;

  static FeatureSpace fit(std::span<const ProcessedTweet> corpus, const GramConfig& chars_cfg,
                          const GramConfig& char_words_cfg, const GramConfig& words_cfg);

  std::size_t gram_width() const { return chars.size() + char_words.size() + words.size(); }

  nlohmann::json to_json() const;
  static FeatureSpace from_json(const nlohmann::json& j);
  bool operator==(const FeatureSpace&) const = default;
};

struct FeatureVector {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> sparse;  // sorted by column
  std::array<std::uint32_t, kDenseWidth> dense{};

  std::uint32_t operator[](DenseFeature f) const { return dense[static_cast<std::size_t>(f)]; }
  bool operator==(const FeatureVector&) const = default;
};

std::array<std::uint32_t, kDenseWidth> dense_counters(const ProcessedTweet& tweet,
                                                      const SentimentLexicons& lex);

FeatureVector vectorize(const ProcessedTweet& tweet, const FeatureSpace& space,
                        const SentimentLexicons& lex);

struct SelectionMask {
  std::size_t columns = 0;              // n-gram columns before selection
  std::vector<std::uint32_t> retained;  // ascending
  std::vector<double> scores;           // one per column
  int percentile = 100;

  // column -> position in `retained`, or -1
  std::vector<std::int32_t> remap() const;

  nlohmann::json to_json() const;
  static SelectionMask from_json(const nlohmann::json& j);
  bool operator==(const SelectionMask&) const = default;
};

// Keeps the top ceil(p/100 * n) scores; ties go to the lower column.
SelectionMask select_percentile(std::span<const double> scores, int percentile);

// Re-indexes the n-gram block to the retained columns; dense counters untouched.
FeatureVector apply_mask(const FeatureVector& v, const SelectionMask& mask);

// Same result as apply_mask(vectorize(...)) without materializing dropped columns.
FeatureVector vectorize(const ProcessedTweet& tweet, const FeatureSpace& space,
                        const SentimentLexicons& lex, const SelectionMask& mask);

// Count-vector chi-squared statistic per column: observed = per-class column
// sums, expected = class share of rows times the column sum. Zero columns score 0.
std::vector<double> chi2_scores(const SparseMatrix& x, std::span<const int> classes,
                                std::size_t class_count);
// n-gram block only, classes are the emotion labels.
std::vector<double> chi2_scores(std::span<const FeatureVector> rows, std::size_t gram_width,
                                std::span<const EmotionLabel> labels);

// Learner row: n-gram counts in [0, gram_width) followed by the dense block
// (left empty for the n-gram-only "basic" feature set). Width is always
// gram_width + kDenseWidth.
SparseRow design_row(const FeatureVector& v, std::size_t gram_width, bool with_dense = true);
SparseMatrix design_matrix(std::span<const FeatureVector> rows, std::size_t gram_width,
                           bool with_dense = true);

struct FeaturePipelineConfig {
  GramConfig chars = GramConfig::of(Analyzer::Char);
  GramConfig char_words = GramConfig::of(Analyzer::CharWordBoundary);
  GramConfig words = GramConfig::of(Analyzer::Word);
  int percentile = 80;
  bool use_dense = true;  // false = n-gram "basic" set only

  void validate() const;
};

// Feature space plus chi-squared selection fitted on one training subset.
struct LayerFeatures {
  FeatureSpace space;
  SelectionMask mask;
  bool use_dense = true;

  // Fits on (tweets, labels in [0, classes)); optionally returns the
  // training design matrix.
  static LayerFeatures fit(std::span<const ProcessedTweet> tweets, std::span<const int> labels,
                           const FeaturePipelineConfig& cfg, const SentimentLexicons& lex,
                           SparseMatrix* design = nullptr, std::size_t classes = 2);

  std::size_t width() const { return mask.retained.size() + kDenseWidth; }
  SparseRow row(const ProcessedTweet& tweet, const SentimentLexicons& lex) const;
  SparseMatrix matrix(std::span<const ProcessedTweet> tweets, const SentimentLexicons& lex) const;
};

inline constexpr int kFeatureFormatVersion = 1;

}  // namespace oppscreen
