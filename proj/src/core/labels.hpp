#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace oppscreen {

// Index order is the confusion-matrix order: S+, P+, N, A-.
enum class EmotionLabel : std::uint8_t {
  PositiveStatement = 0,
  Opportunity = 1,
  Neutral = 2,
  NegativeAwareness = 3,
};

inline constexpr std::size_t kLabelCount = 4;

inline constexpr std::array<EmotionLabel, kLabelCount> kAllLabels = {
    EmotionLabel::PositiveStatement, EmotionLabel::Opportunity,
    EmotionLabel::Neutral, EmotionLabel::NegativeAwareness};

constexpr std::size_t index_of(EmotionLabel l) { return static_cast<std::size_t>(l); }

// "S+", "P+", "N", "A-"
std::string_view label_symbol(EmotionLabel l);
// "positive_statement", "opportunity", "neutral", "negative_awareness"
std::string_view label_name(EmotionLabel l);

// Case-insensitive; accepts the long names and the symbols (A- or A−).
std::optional<EmotionLabel> parse_label(std::string_view s);

}  // namespace oppscreen
