#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "core/labels.hpp"
#include "core/preprocess.hpp"
#include "json.hpp"

namespace oppscreen {

// One line of a processed corpus file.
struct LabeledTweet {
  ProcessedTweet tweet;
  std::optional<EmotionLabel> emotion;

  bool operator==(const LabeledTweet&) const = default;
};

nlohmann::json processed_to_json(const LabeledTweet& t);
LabeledTweet processed_from_json(const nlohmann::json& j);

std::string format_processed(std::span<const LabeledTweet> rows);
// Errors name the offending line.
std::vector<LabeledTweet> parse_processed(std::string_view content, std::string_view source = "<input>");
std::vector<LabeledTweet> load_processed(const std::filesystem::path& path);
void save_processed(const std::filesystem::path& path, std::span<const LabeledTweet> rows);

// Splits into tweets and labels; throws when a row has no label.
void split_labeled(std::span<const LabeledTweet> rows, std::vector<ProcessedTweet>& tweets,
                   std::vector<EmotionLabel>& labels);

}  // namespace oppscreen
