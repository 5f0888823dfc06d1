#include "core/labels.hpp"

#include "core/text.hpp"

namespace oppscreen {

std::string_view label_symbol(EmotionLabel l) {
  switch (l) {
    case EmotionLabel::PositiveStatement: return "S+";
    case EmotionLabel::Opportunity: return "P+";
    case EmotionLabel::Neutral: return "N";
    case EmotionLabel::NegativeAwareness: return "A-";
  }
  return "?";
}

std::string_view label_name(EmotionLabel l) {
  switch (l) {
    case EmotionLabel::PositiveStatement: return "positive_statement";
    case EmotionLabel::Opportunity: return "opportunity";
    case EmotionLabel::Neutral: return "neutral";
    case EmotionLabel::NegativeAwareness: return "negative_awareness";
  }
  return "?";
}

std::optional<EmotionLabel> parse_label(std::string_view s) {
  const std::string key = text::fold(text::trim(s));
  if (key == "opportunity" || key == "p+") return EmotionLabel::Opportunity;
  if (key == "positive_statement" || key == "s+") return EmotionLabel::PositiveStatement;
  if (key == "neutral" || key == "n") return EmotionLabel::Neutral;
  if (key == "negative_awareness" || key == "a-" || key == "a−") {
    return EmotionLabel::NegativeAwareness;
  }
  return std::nullopt;
}

}  // namespace oppscreen
