#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/corpus.hpp"
#include "core/lexicon.hpp"

namespace oppscreen {

struct FilterConfig {
  std::vector<std::string> spam_phrases;
  double language_coverage_threshold = 0.5;
  double jaccard_threshold = 0.75;
  bool require_finance_marker = true;

  void validate() const;
};

enum class QuantityTag : std::uint8_t { Plus, Minus, PlusPct, MinusPct };

std::string_view quantity_tag_name(QuantityTag t);

struct ProcessedTweet {
  std::int64_t id = 0;
  std::vector<std::string> tokens;
  std::vector<std::string> tickers;
  std::vector<std::string> mentions;
  std::vector<std::string> hashtags;
  std::vector<QuantityTag> quantity_tags;
  std::uint32_t laugh_count = 0;
  std::uint32_t exclamation_count = 0;
  std::uint32_t interrogation_count = 0;
  std::vector<std::string> emojis;
  // Indexed by Tense (None slot unused).
  std::array<std::uint32_t, 5> tense_counts{};

  bool operator==(const ProcessedTweet&) const = default;
};

// Everything the pipeline needs; immutable once loaded.
struct PreprocessResources {
  FrequencyLexicon lexicon;
  LemmaDictionary lemmas;
  WordSet stopwords;
  WordSet keepwords;
  WordSet index_hashtags;
  FilterConfig filter;
  std::size_t max_edit = 2;
};

struct ResourcePaths {
  std::filesystem::path lexicon;
  std::filesystem::path lemmas;
  std::filesystem::path stopwords;
  std::filesystem::path keepwords;
  std::filesystem::path spam;
  std::filesystem::path index_hashtags;
};

PreprocessResources load_preprocess_resources(const ResourcePaths& paths, FilterConfig filter);

enum class DiscardReason { Spam, Language, NoFinanceMarker, Duplicate };

std::string_view discard_reason_name(DiscardReason r);

struct FilterDecision {
  bool keep = true;
  DiscardReason reason = DiscardReason::Spam;
};

// Order of checks: spam phrase, lexicon coverage, finance marker.
FilterDecision filter_relevant(const AnnotatedTweet& tweet, const FilterConfig& config,
                               const FrequencyLexicon& lexicon,
                               const WordSet& index_hashtags = {});

// |a ∩ b| / |a ∪ b|, with two empty sets defined as identical (1.0).
double jaccard_similarity(const std::set<std::string>& a, const std::set<std::string>& b);

struct DedupResult {
  std::vector<std::int64_t> survivors;
  // survivor id -> ids dropped because of it
  std::map<std::int64_t, std::vector<std::int64_t>> groups;
};

// Greedy scan in id order: a tweet is dropped when its token-set similarity
// to any earlier survivor reaches the threshold.
DedupResult deduplicate(std::span<const ProcessedTweet> corpus, double threshold);

// Maximum sum of log relative frequencies segmentation. Pieces are slices of
// the original token, so they concatenate back to it exactly. Returns {token}
// when the token is already a word or no full segmentation exists.
std::vector<std::string> split_compound(std::string_view token, const FrequencyLexicon& lexicon);

// Closest in-lexicon word within max_edit (Levenshtein over code points,
// distance-2 candidates must share the first letter); ties go to the more
// frequent word, then the lexicographically smaller one.
std::string correct_spelling(std::string_view token, const FrequencyLexicon& lexicon,
                             std::size_t max_edit = 2);

enum class MarkerKind : std::uint8_t { Ticker, Mention, Hashtag };

struct Marker {
  MarkerKind kind;
  std::string value;
};

struct MarkerExtraction {
  // Text with markers, URLs and RT tags removed, whitespace collapsed.
  std::string text;
  std::vector<std::string> tickers;
  std::vector<std::string> mentions;
  std::vector<std::string> hashtags;
  // Same text before collapsing, with U+E000 where each marker stood (in
  // order of `markers`); the pipeline substitutes hashtag/mention splits there.
  std::string templated;
  std::vector<Marker> markers;
};

MarkerExtraction extract_markers(std::string_view text);

struct QuantityNormalization {
  std::string text;
  std::vector<QuantityTag> quantity_tags;
  std::uint32_t laugh_count = 0;
};

// Signed/unsigned numbers and percentages become "+"/"-"; laughter becomes LAUGH.
QuantityNormalization normalize_quantities_and_laughter(std::string_view text);

// j/h alternating with a/e/i, length >= 4, with a repeated syllable (so "hija"
// is not laughter but "jaja" is).
bool is_laughter(std::u32string_view word);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const WordSet& stoplist, const WordSet& keeplist);

struct LemmaResult {
  std::string lemma;
  Tense tense = Tense::None;
};

LemmaResult lemmatize(std::string_view token, const LemmaDictionary& dict);

// Tags produced by the pipeline that later stages pass through untouched.
bool is_reserved_token(std::string_view token);

inline constexpr std::string_view kLaughToken = "LAUGH";
inline constexpr std::string_view kEmojiPrefix = "EMOJI_";

ProcessedTweet preprocess_pipeline(const AnnotatedTweet& tweet, const PreprocessResources& res);

}  // namespace oppscreen
