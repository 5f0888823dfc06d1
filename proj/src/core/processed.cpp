#include "core/processed.hpp"

#include "core/error.hpp"
#include "core/io.hpp"

namespace oppscreen {

using nlohmann::json;

namespace {

std::optional<QuantityTag> parse_quantity_tag(std::string_view s) {
  for (QuantityTag q : {QuantityTag::Plus, QuantityTag::Minus, QuantityTag::PlusPct, QuantityTag::MinusPct}) {
    if (quantity_tag_name(q) == s) return q;
  }
  return std::nullopt;
}

}  // namespace

json processed_to_json(const LabeledTweet& t) {
  const auto& p = t.tweet;
  json tags = json::array();
  for (QuantityTag q : p.quantity_tags) tags.push_back(quantity_tag_name(q));
  json tense = json::object();
  for (Tense x : {Tense::Past, Tense::Present, Tense::Future, Tense::Conditional}) {
    tense[std::string(tense_name(x))] = p.tense_counts[static_cast<std::size_t>(x)];
  }
  json j{{"id", p.id},
         {"tokens", p.tokens},
         {"tickers", p.tickers},
         {"mentions", p.mentions},
         {"hashtags", p.hashtags},
         {"quantity_tags", tags},
         {"laugh_count", p.laugh_count},
         {"exclamation_count", p.exclamation_count},
         {"interrogation_count", p.interrogation_count},
         {"emojis", p.emojis},
         {"tense_counts", tense}};
  if (t.emotion) j["emotion"] = label_symbol(*t.emotion);
  return j;
}

LabeledTweet processed_from_json(const json& j) {
  LabeledTweet t;
  auto& p = t.tweet;
  p.id = j.at("id").get<std::int64_t>();
  p.tokens = j.at("tokens").get<std::vector<std::string>>();
  p.tickers = j.value("tickers", std::vector<std::string>{});
  p.mentions = j.value("mentions", std::vector<std::string>{});
  p.hashtags = j.value("hashtags", std::vector<std::string>{});
  for (const auto& s : j.value("quantity_tags", std::vector<std::string>{})) {
    const auto q = parse_quantity_tag(s);
    if (!q) throw Error(ErrorKind::Parse, "unknown quantity tag '" + s + "'");
    p.quantity_tags.push_back(*q);
  }
  p.laugh_count = j.value("laugh_count", 0u);
  p.exclamation_count = j.value("exclamation_count", 0u);
  p.interrogation_count = j.value("interrogation_count", 0u);
  p.emojis = j.value("emojis", std::vector<std::string>{});
  if (j.contains("tense_counts")) {
    for (const auto& [k, v] : j.at("tense_counts").items()) {
      const auto x = parse_tense(k);
      if (!x || *x == Tense::None) throw Error(ErrorKind::Parse, "unknown tense '" + k + "'");
      p.tense_counts[static_cast<std::size_t>(*x)] = v.get<std::uint32_t>();
    }
  }
  if (j.contains("emotion") && !j.at("emotion").is_null()) {
    const auto s = j.at("emotion").get<std::string>();
    t.emotion = parse_label(s);
    if (!t.emotion) throw Error(ErrorKind::Parse, "unknown emotion label '" + s + "'");
  }
  return t;
}

std::string format_processed(std::span<const LabeledTweet> rows) {
  std::string out;
  for (const auto& r : rows) {
    out += processed_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<LabeledTweet> parse_processed(std::string_view content, std::string_view source) {
  std::vector<LabeledTweet> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    const std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      rows.push_back(processed_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse, std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<LabeledTweet> load_processed(const std::filesystem::path& path) {
  return parse_processed(io::read_file(path), path.string());
}

void save_processed(const std::filesystem::path& path, std::span<const LabeledTweet> rows) {
  io::write_file_atomic(path, format_processed(rows));
}

void split_labeled(std::span<const LabeledTweet> rows, std::vector<ProcessedTweet>& tweets,
                   std::vector<EmotionLabel>& labels) {
  tweets.clear();
  labels.clear();
  for (const auto& r : rows) {
    if (!r.emotion) throw Error(ErrorKind::Data, "tweet " + std::to_string(r.tweet.id) + " has no emotion label");
    tweets.push_back(r.tweet);
    labels.push_back(*r.emotion);
  }
}

}  // namespace oppscreen
