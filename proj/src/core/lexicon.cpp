#include "core/lexicon.hpp"

#include <sstream>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/text.hpp"

namespace oppscreen {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <typename Fn>
void for_each_row(std::string_view content, std::string_view source, Fn&& fn) {
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty() || line[0] == '#') continue;
    fn(split_tabs(line), std::string(source) + ":" + std::to_string(n));
  }
}

const std::vector<std::size_t> kNoWords;

}  // namespace

FrequencyLexicon FrequencyLexicon::parse(std::string_view tsv, std::string_view source) {
  FrequencyLexicon lex;
  for_each_row(tsv, source, [&](const std::vector<std::string>& f, const std::string& at) {
    if (f.size() < 2) throw Error(ErrorKind::Parse, at + ": expected word<TAB>frequency");
    const std::string word = text::trim(f[0]);
    const std::string freq = text::trim(f[1]);
    std::uint64_t value = 0;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(freq, &used);
      if (used != freq.size() || v < 0) throw std::invalid_argument(freq);
      value = static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, at + ": bad frequency '" + freq + "'");
    }
    if (word.empty()) throw Error(ErrorKind::Parse, at + ": empty word");
    lex.add(word, value);
  });
  return lex;
}

FrequencyLexicon FrequencyLexicon::load(const std::filesystem::path& path) {
  return parse(io::read_file(path), path.string());
}

void FrequencyLexicon::add(std::string_view word, std::uint64_t frequency) {
  const std::u32string cps = text::fold(text::decode(word));
  const std::string key = text::encode(cps);
  total_ += frequency;
  if (auto it = index_.find(key); it != index_.end()) {
    words_[it->second].frequency += frequency;
    return;
  }
  index_.emplace(key, words_.size());
  by_length_[cps.size()].push_back(words_.size());
  words_.push_back({cps, key, frequency});
}

bool FrequencyLexicon::contains(std::string_view word) const {
  return index_.count(text::fold(word)) > 0;
}

std::uint64_t FrequencyLexicon::frequency(std::string_view word) const {
  auto it = index_.find(text::fold(word));
  return it == index_.end() ? 0 : words_[it->second].frequency;
}

const std::vector<std::size_t>& FrequencyLexicon::words_of_length(std::size_t len) const {
  auto it = by_length_.find(len);
  return it == by_length_.end() ? kNoWords : it->second;
}

std::string_view tense_name(Tense t) {
  switch (t) {
    case Tense::None: return "none";
    case Tense::Past: return "past";
    case Tense::Present: return "present";
    case Tense::Future: return "future";
    case Tense::Conditional: return "conditional";
  }
  return "none";
}

std::optional<Tense> parse_tense(std::string_view s) {
  const auto f = text::fold(text::trim(s));
  if (f.empty() || f == "none" || f == "-") return Tense::None;
  if (f == "past") return Tense::Past;
  if (f == "present") return Tense::Present;
  if (f == "future") return Tense::Future;
  if (f == "conditional") return Tense::Conditional;
  return std::nullopt;
}

LemmaDictionary LemmaDictionary::parse(std::string_view tsv, std::string_view source) {
  LemmaDictionary dict;
  for_each_row(tsv, source, [&](const std::vector<std::string>& f, const std::string& at) {
    if (f.size() < 4) throw Error(ErrorKind::Parse, at + ": expected surface<TAB>lemma<TAB>pos<TAB>tense");
    auto tense = parse_tense(f[3]);
    if (!tense) throw Error(ErrorKind::Parse, at + ": unknown tense '" + f[3] + "'");
    LemmaEntry e{text::fold(text::trim(f[1])), text::trim(f[2]), *tense};
    if (e.lemma.empty()) throw Error(ErrorKind::Parse, at + ": empty lemma");
    try {
      dict.add(text::trim(f[0]), std::move(e));
    } catch (const Error& err) {
      throw Error(ErrorKind::Parse, at + ": " + err.what());
    }
  });
  return dict;
}

LemmaDictionary LemmaDictionary::load(const std::filesystem::path& path) {
  return parse(io::read_file(path), path.string());
}

void LemmaDictionary::add(std::string_view surface, LemmaEntry entry) {
  const std::string key = text::fold(surface);
  if (!entries_.emplace(key, std::move(entry)).second) {
    throw Error(ErrorKind::Data, "duplicate surface form '" + key + "'");
  }
}

const LemmaEntry* LemmaDictionary::find(std::string_view surface) const {
  auto it = entries_.find(text::fold(surface));
  return it == entries_.end() ? nullptr : &it->second;
}

WordSet::WordSet(std::initializer_list<std::string_view> words) {
  for (auto w : words) insert(w);
}

WordSet WordSet::load(const std::filesystem::path& path) {
  WordSet s;
  for (const auto& w : io::read_list(path)) s.insert(w);
  return s;
}

void WordSet::insert(std::string_view w) { words_.insert(text::fold(w)); }

bool WordSet::contains(std::string_view w) const { return words_.count(text::fold(w)) > 0; }

}  // namespace oppscreen
