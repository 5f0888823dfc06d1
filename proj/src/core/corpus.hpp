#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/labels.hpp"

namespace oppscreen {

struct AnnotatedTweet {
  std::int64_t id = 0;
  std::string text;
  std::vector<std::string> tickers;
  EmotionLabel emotion = EmotionLabel::Neutral;
  bool labeled = true;  // false only for unlabeled input read with require_labels = false
};

enum class DatasetFormat { Jsonl, Csv };

DatasetFormat parse_dataset_format(std::string_view s);
// Guess from the file extension (.csv -> Csv, anything else -> Jsonl).
DatasetFormat format_for_path(const std::filesystem::path& path);

// Parses a whole dataset document. Duplicate ids, unknown emotion strings,
// empty text and malformed rows raise Error(Parse|Data) naming the line.
// With require_labels = false a missing emotion (or empty CSV cell/column)
// leaves the tweet unlabeled.
std::vector<AnnotatedTweet> parse_dataset(std::string_view content, DatasetFormat format,
                                          std::string_view source = "<memory>", bool require_labels = true);
std::vector<AnnotatedTweet> load_dataset(const std::filesystem::path& path, DatasetFormat format,
                                         bool require_labels = true);

std::string format_dataset(std::span<const AnnotatedTweet> tweets, DatasetFormat format);
void save_dataset(const std::filesystem::path& path, std::span<const AnnotatedTweet> tweets,
                  DatasetFormat format);

struct AnnotationBallot {
  std::int64_t tweet_id = 0;
  std::vector<EmotionLabel> votes;
};

std::vector<AnnotationBallot> parse_ballots(std::string_view content,
                                            std::string_view source = "<memory>");
std::vector<AnnotationBallot> load_ballots(const std::filesystem::path& path);

// Majority vote. Ties are broken uniformly at random among the tied labels
// with a generator derived from (seed, tweet_id), so the result does not
// depend on vote order.
EmotionLabel aggregate_annotations(const AnnotationBallot& ballot, std::uint64_t seed);

struct LabeledId {
  std::int64_t id = 0;
  EmotionLabel label = EmotionLabel::Neutral;
};

struct FoldAssignment {
  std::size_t k = 0;
  std::map<std::int64_t, std::size_t> assignment;

  std::vector<std::int64_t> members(std::size_t fold) const;
};

// Stratified k-fold partition: each class is shuffled with the seed and dealt
// round-robin, continuing the deal position across classes so fold sizes also
// stay within one of each other.
FoldAssignment stratified_folds(std::span<const LabeledId> items, std::size_t k,
                                std::uint64_t seed);
FoldAssignment stratified_folds(std::span<const AnnotatedTweet> dataset, std::size_t k,
                                std::uint64_t seed);

}  // namespace oppscreen
