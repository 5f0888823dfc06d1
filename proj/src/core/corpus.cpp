#include "core/corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/random.hpp"
#include "core/text.hpp"
#include "json.hpp"

namespace oppscreen {

using nlohmann::json;

namespace {

std::string where(std::string_view source, std::size_t line) {
  std::ostringstream ss;
  ss << source << ":" << line;
  return ss.str();
}

std::vector<std::string> split_tickers(std::string_view field) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : field) {
    if (c == ';') {
      auto t = text::trim(cur);
      if (!t.empty()) out.push_back(std::move(t));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  auto t = text::trim(cur);
  if (!t.empty()) out.push_back(std::move(t));
  return out;
}

EmotionLabel require_label(std::string_view s, std::string_view source, std::size_t line) {
  auto label = parse_label(s);
  if (!label) {
    throw Error(ErrorKind::Data,
                where(source, line) + ": unknown emotion label '" + std::string(s) + "'");
  }
  return *label;
}

struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// RFC 4180: quoted fields may hold commas, doubled quotes and line breaks.
std::vector<CsvRecord> parse_csv(std::string_view content, std::string_view source) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = content.size();
  while (i < n) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool record_done = false;
    while (!record_done) {
      field.clear();
      if (i < n && content[i] == '"') {
        ++i;
        bool closed = false;
        while (i < n) {
          char c = content[i];
          if (c == '"') {
            if (i + 1 < n && content[i + 1] == '"') {
              field.push_back('"');
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
            ++i;
          }
        }
        if (!closed) throw Error(ErrorKind::Parse, where(source, rec.line) + ": unterminated quoted field");
        if (i < n && content[i] != ',' && content[i] != '\n' && content[i] != '\r') {
          throw Error(ErrorKind::Parse, where(source, line) + ": text after closing quote");
        }
      } else {
        while (i < n && content[i] != ',' && content[i] != '\n' && content[i] != '\r') {
          if (content[i] == '"') {
            throw Error(ErrorKind::Parse, where(source, line) + ": stray quote in unquoted field");
          }
          field.push_back(content[i]);
          ++i;
        }
      }
      rec.fields.push_back(field);
      if (i >= n) {
        record_done = true;
      } else if (content[i] == ',') {
        ++i;
      } else {
        if (content[i] == '\r') ++i;
        if (i < n && content[i] == '\n') ++i;
        ++line;
        record_done = true;
      }
    }
    const bool blank = rec.fields.size() == 1 && rec.fields[0].empty();
    if (!blank) records.push_back(std::move(rec));
  }
  return records;
}

std::string csv_quote(std::string_view s) {
  const bool needs = s.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void check_unique(std::vector<AnnotatedTweet>& out, std::set<std::int64_t>& seen,
                  AnnotatedTweet t, std::string_view source, std::size_t line) {
  if (t.text.empty()) throw Error(ErrorKind::Data, where(source, line) + ": empty text");
  if (!seen.insert(t.id).second) {
    throw Error(ErrorKind::Data,
                where(source, line) + ": duplicate id " + std::to_string(t.id));
  }
  out.push_back(std::move(t));
}

std::vector<AnnotatedTweet> parse_jsonl(std::string_view content, std::string_view source, bool require_labels) {
  std::vector<AnnotatedTweet> out;
  std::set<std::int64_t> seen;
  std::istringstream in{std::string(content)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (text::trim(raw).empty()) continue;
    json row;
    try {
      row = json::parse(raw);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse, where(source, line) + ": " + e.what());
    }
    const bool has_emotion = row.is_object() && row.contains("emotion") && !row["emotion"].is_null();
    if (!row.is_object() || !row.contains("id") || !row.contains("text") || (require_labels && !has_emotion)) {
      throw Error(ErrorKind::Parse, where(source, line) + ": missing id/text/emotion");
    }
    if (!row["id"].is_number_integer() || !row["text"].is_string() ||
        (has_emotion && !row["emotion"].is_string())) {
      throw Error(ErrorKind::Parse, where(source, line) + ": wrong field type");
    }
    AnnotatedTweet t;
    t.id = row["id"].get<std::int64_t>();
    t.text = row["text"].get<std::string>();
    if (has_emotion) {
      t.emotion = require_label(row["emotion"].get<std::string>(), source, line);
    } else {
      t.labeled = false;
    }
    if (row.contains("tickers")) {
      const auto& tk = row["tickers"];
      if (!tk.is_array()) throw Error(ErrorKind::Parse, where(source, line) + ": tickers must be an array");
      for (const auto& v : tk) {
        if (!v.is_string()) throw Error(ErrorKind::Parse, where(source, line) + ": ticker must be a string");
        t.tickers.push_back(v.get<std::string>());
      }
    } else if (row.contains("ticker")) {
      if (!row["ticker"].is_string()) throw Error(ErrorKind::Parse, where(source, line) + ": ticker must be a string");
      t.tickers = split_tickers(row["ticker"].get<std::string>());
    }
    check_unique(out, seen, std::move(t), source, line);
  }
  return out;
}

std::vector<AnnotatedTweet> parse_csv_dataset(std::string_view content, std::string_view source,
                                              bool require_labels) {
  std::vector<AnnotatedTweet> out;
  auto records = parse_csv(content, source);
  if (records.empty()) return out;
  const auto& header = records.front().fields;
  auto column = [&](std::string_view name, bool required = true) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::fold(text::trim(header[i])) == name) return i;
    }
    if (name == "tickers") {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (text::fold(text::trim(header[i])) == "ticker") return i;
      }
    }
    if (!required) return header.size();
    throw Error(ErrorKind::Parse, where(source, 1) + ": header lacks column '" + std::string(name) + "'");
  };
  const std::size_t c_id = column("id");
  const std::size_t c_text = column("text");
  const std::size_t c_tickers = column("tickers");
  const std::size_t c_emotion = column("emotion", require_labels);
  std::set<std::int64_t> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw Error(ErrorKind::Parse, where(source, rec.line) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(rec.fields.size()));
    }
    AnnotatedTweet t;
    const std::string id_str = text::trim(rec.fields[c_id]);
    try {
      std::size_t used = 0;
      t.id = std::stoll(id_str, &used);
      if (used != id_str.size()) throw std::invalid_argument(id_str);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, where(source, rec.line) + ": bad id '" + id_str + "'");
    }
    t.text = rec.fields[c_text];
    t.tickers = split_tickers(rec.fields[c_tickers]);
    if (c_emotion < header.size() && (require_labels || !text::trim(rec.fields[c_emotion]).empty())) {
      t.emotion = require_label(rec.fields[c_emotion], source, rec.line);
    } else {
      t.labeled = false;
    }
    check_unique(out, seen, std::move(t), source, rec.line);
  }
  return out;
}

}  // namespace

DatasetFormat parse_dataset_format(std::string_view s) {
  const auto f = text::fold(s);
  if (f == "jsonl" || f == "json") return DatasetFormat::Jsonl;
  if (f == "csv") return DatasetFormat::Csv;
  throw Error(ErrorKind::InvalidArgument, "unknown dataset format '" + std::string(s) + "'");
}

DatasetFormat format_for_path(const std::filesystem::path& path) {
  return text::fold(path.extension().string()) == ".csv" ? DatasetFormat::Csv
                                                          : DatasetFormat::Jsonl;
}

std::vector<AnnotatedTweet> parse_dataset(std::string_view content, DatasetFormat format,
                                          std::string_view source, bool require_labels) {
  return format == DatasetFormat::Csv ? parse_csv_dataset(content, source, require_labels)
                                      : parse_jsonl(content, source, require_labels);
}

std::vector<AnnotatedTweet> load_dataset(const std::filesystem::path& path, DatasetFormat format,
                                         bool require_labels) {
  return parse_dataset(io::read_file(path), format, path.string(), require_labels);
}

std::string format_dataset(std::span<const AnnotatedTweet> tweets, DatasetFormat format) {
  std::string out;
  if (format == DatasetFormat::Csv) {
    out = "id,text,tickers,emotion\n";
    for (const auto& t : tweets) {
      out += std::to_string(t.id) + "," + csv_quote(t.text) + "," +
             csv_quote(text::join(t.tickers, ";")) + "," +
             (t.labeled ? std::string(label_name(t.emotion)) : std::string()) + "\n";
    }
    return out;
  }
  for (const auto& t : tweets) {
    json row = {{"id", t.id}, {"text", t.text}, {"tickers", t.tickers}};
    if (t.labeled) row["emotion"] = std::string(label_name(t.emotion));
    out += row.dump(-1, ' ', false, json::error_handler_t::strict) + "\n";
  }
  return out;
}

void save_dataset(const std::filesystem::path& path, std::span<const AnnotatedTweet> tweets,
                  DatasetFormat format) {
  io::write_file_atomic(path, format_dataset(tweets, format));
}

std::vector<AnnotationBallot> parse_ballots(std::string_view content, std::string_view source) {
  std::vector<AnnotationBallot> out;
  std::istringstream in{std::string(content)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (text::trim(raw).empty()) continue;
    json row;
    try {
      row = json::parse(raw);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse, where(source, line) + ": " + e.what());
    }
    if (!row.is_object() || !row.contains("tweet_id") || !row.contains("votes") ||
        !row["tweet_id"].is_number_integer() || !row["votes"].is_array()) {
      throw Error(ErrorKind::Parse, where(source, line) + ": expected tweet_id and votes array");
    }
    AnnotationBallot b;
    b.tweet_id = row["tweet_id"].get<std::int64_t>();
    for (const auto& v : row["votes"]) {
      if (!v.is_string()) throw Error(ErrorKind::Parse, where(source, line) + ": vote must be a string");
      b.votes.push_back(require_label(v.get<std::string>(), source, line));
    }
    if (b.votes.empty()) throw Error(ErrorKind::Data, where(source, line) + ": empty ballot");
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<AnnotationBallot> load_ballots(const std::filesystem::path& path) {
  return parse_ballots(io::read_file(path), path.string());
}

EmotionLabel aggregate_annotations(const AnnotationBallot& ballot, std::uint64_t seed) {
  if (ballot.votes.empty()) {
    throw Error(ErrorKind::Data, "empty ballot for tweet " + std::to_string(ballot.tweet_id));
  }
  std::array<std::size_t, kLabelCount> counts{};
  for (auto v : ballot.votes) ++counts[index_of(v)];
  const std::size_t top = *std::max_element(counts.begin(), counts.end());
  std::vector<EmotionLabel> tied;
  for (auto l : kAllLabels) {
    if (counts[index_of(l)] == top) tied.push_back(l);
  }
  if (tied.size() == 1) return tied.front();
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(ballot.tweet_id)));
  return tied[rng.index(tied.size())];
}

std::vector<std::int64_t> FoldAssignment::members(std::size_t fold) const {
  std::vector<std::int64_t> out;
  for (const auto& [id, f] : assignment) {
    if (f == fold) out.push_back(id);
  }
  return out;
}

FoldAssignment stratified_folds(std::span<const LabeledId> items, std::size_t k,
                                std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "fold count must be at least 2");
  std::array<std::vector<std::int64_t>, kLabelCount> by_class;
  for (const auto& it : items) by_class[index_of(it.label)].push_back(it.id);
  for (auto l : kAllLabels) {
    auto& ids = by_class[index_of(l)];
    if (!ids.empty() && ids.size() < k) {
      throw Error(ErrorKind::Data, "class " + std::string(label_symbol(l)) + " has " +
                                       std::to_string(ids.size()) + " members, fewer than k=" +
                                       std::to_string(k));
    }
  }
  FoldAssignment fa;
  fa.k = k;
  Rng rng(seed);
  std::size_t position = 0;
  for (auto l : kAllLabels) {
    auto ids = by_class[index_of(l)];
    std::sort(ids.begin(), ids.end());
    rng.shuffle(ids);
    for (auto id : ids) {
      if (!fa.assignment.emplace(id, position % k).second) {
        throw Error(ErrorKind::Data, "duplicate id " + std::to_string(id));
      }
      ++position;
    }
  }
  return fa;
}

FoldAssignment stratified_folds(std::span<const AnnotatedTweet> dataset, std::size_t k,
                                std::uint64_t seed) {
  std::vector<LabeledId> items;
  items.reserve(dataset.size());
  for (const auto& t : dataset) items.push_back({t.id, t.emotion});
  return stratified_folds(items, k, seed);
}

}  // namespace oppscreen
