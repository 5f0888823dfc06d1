#include "core/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/text.hpp"

namespace oppscreen {

namespace {

constexpr char32_t kPlaceholder = 0xE000;

// Spell correction is not attempted on shorter out-of-lexicon words; with
// two edits almost any 1-3 letter string reaches some short word.
constexpr std::size_t kMinCorrectableLength = 4;

bool is_word_char(char32_t cp) { return text::is_letter(cp) || text::is_digit(cp) || cp == U'_'; }

bool is_sign(char32_t cp) { return cp == U'+' || cp == U'-' || cp == 0x2212; }

bool has_letter(std::u32string_view s) {
  return std::any_of(s.begin(), s.end(), [](char32_t c) { return text::is_letter(c); });
}

bool starts_with_ci(const std::u32string& s, std::size_t at, std::u32string_view prefix) {
  if (at + prefix.size() > s.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (text::fold(s[at + k]) != prefix[k]) return false;
  }
  return true;
}

std::size_t run_end(const std::u32string& s, std::size_t i) {
  while (i < s.size() && is_word_char(s[i])) ++i;
  return i;
}

const WordSet& days_and_months() {
  static const WordSet kSet = {
      "lunes",   "martes",  "miércoles", "miercoles",  "jueves",  "viernes",   "sábado",
      "sabado",  "domingo", "enero",     "febrero",    "marzo",   "abril",     "mayo",
      "junio",   "julio",   "agosto",    "septiembre", "setiembre", "octubre", "noviembre",
      "diciembre"};
  return kSet;
}

bool contains_phrase(const std::u32string& hay, const std::u32string& needle) {
  if (needle.empty()) return false;
  std::size_t pos = 0;
  while ((pos = hay.find(needle, pos)) != std::u32string::npos) {
    const bool left_ok = pos == 0 || !text::is_letter(hay[pos - 1]) || !text::is_letter(needle.front());
    const std::size_t end = pos + needle.size();
    const bool right_ok = end >= hay.size() || !text::is_letter(hay[end]) || !text::is_letter(needle.back());
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

bool has_quantity(const std::u32string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (text::is_digit(s[i]) && (i == 0 || !text::is_letter(s[i - 1]))) return true;
  }
  return false;
}

struct Tokenized {
  std::vector<std::string> tokens;
  std::uint32_t exclamations = 0;
  std::uint32_t interrogations = 0;
  std::vector<std::string> emojis;
};

void push_emoji(Tokenized& out, std::string name) {
  out.tokens.push_back(std::string(kEmojiPrefix) + name);
  out.emojis.push_back(std::move(name));
}

// Whitespace tokenization with punctuation isolated. Keeps words, sign tags,
// '!'/'?' and emoji; all other punctuation is dropped.
Tokenized tokenize(std::string_view normalized) {
  Tokenized out;
  const auto s = text::decode(normalized);
  const std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = s[i];
    if (is_word_char(c)) {
      const std::size_t j = run_end(s, i);
      const std::u32string run = s.substr(i, j - i);
      i = j;
      if (!has_letter(run)) continue;
      const std::string utf8 = text::encode(run);
      if (is_reserved_token(utf8)) {
        if (utf8.rfind(kEmojiPrefix, 0) == 0) {
          out.tokens.push_back(utf8);
          out.emojis.push_back(utf8.substr(kEmojiPrefix.size()));
        } else {
          out.tokens.push_back(utf8);
        }
      } else {
        out.tokens.push_back(text::encode(text::fold(run)));
      }
      continue;
    }
    if (c == U'!') {
      out.tokens.emplace_back("!");
      ++out.exclamations;
    } else if (c == U'?') {
      out.tokens.emplace_back("?");
      ++out.interrogations;
    } else if (is_sign(c)) {
      const bool left_free = i == 0 || !is_word_char(s[i - 1]);
      const bool right_free = i + 1 >= n || !is_word_char(s[i + 1]);
      if (left_free && right_free) out.tokens.emplace_back(c == U'+' ? "+" : "-");
    } else if (c == U':' && (i == 0 || !text::is_digit(s[i - 1]))) {
      std::size_t k = i + 1;
      if (k < n && s[k] == U'-') ++k;
      if (k < n && (s[k] == U')' || s[k] == U'(')) {
        push_emoji(out, s[k] == U')' ? "slightly_smiling_face" : "slightly_frowning_face");
        i = k + 1;
        continue;
      }
    } else if (text::is_emoji(c)) {
      push_emoji(out, text::emoji_name(c));
      ++i;
      while (i < n && text::is_emoji_modifier(s[i])) ++i;
      continue;
    }
    ++i;
  }
  return out;
}

// Replaces out-of-lexicon words by their spelling correction, or removes
// them when no in-lexicon candidate exists (foreign-language words).
std::string correct_words(std::string_view input, const PreprocessResources& res) {
  const auto s = text::decode(input);
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_char(s[i])) {
      out.push_back(s[i++]);
      continue;
    }
    const std::size_t j = run_end(s, i);
    const std::u32string run = s.substr(i, j - i);
    i = j;
    if (!has_letter(run) || is_laughter(run) || is_reserved_token(text::encode(run))) {
      out += run;
      continue;
    }
    const std::u32string folded = text::fold(run);
    const std::string key = text::encode(folded);
    if (res.lexicon.contains(key)) {
      out += run;
      continue;
    }
    if (folded.size() >= kMinCorrectableLength) {
      const std::string fixed = correct_spelling(key, res.lexicon, res.max_edit);
      if (fixed != key && res.lexicon.contains(fixed)) {
        out += text::decode(fixed);
        continue;
      }
    }
    out.push_back(U' ');
  }
  return text::encode(out);
}

std::string marker_replacement(const Marker& m, const PreprocessResources& res) {
  if (m.kind == MarkerKind::Ticker) return " ";
  if (res.index_hashtags.contains(m.value)) return " ";
  const auto pieces = split_compound(m.value, res.lexicon);
  for (const auto& p : pieces) {
    if (!res.lexicon.contains(p)) return " ";
  }
  std::string out = " ";
  for (const auto& p : pieces) out += text::fold(p) + " ";
  return out;
}

}  // namespace

void FilterConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(language_coverage_threshold)) {
    throw Error(ErrorKind::InvalidArgument, "language coverage threshold must be in [0,1]");
  }
  if (!in_unit(jaccard_threshold)) {
    throw Error(ErrorKind::InvalidArgument, "jaccard threshold must be in [0,1]");
  }
}

std::string_view quantity_tag_name(QuantityTag t) {
  switch (t) {
    case QuantityTag::Plus: return "PLUS";
    case QuantityTag::Minus: return "MINUS";
    case QuantityTag::PlusPct: return "PLUS_PCT";
    case QuantityTag::MinusPct: return "MINUS_PCT";
  }
  return "PLUS";
}

std::string_view discard_reason_name(DiscardReason r) {
  switch (r) {
    case DiscardReason::Spam: return "spam";
    case DiscardReason::Language: return "language";
    case DiscardReason::NoFinanceMarker: return "no_finance_marker";
    case DiscardReason::Duplicate: return "duplicate";
  }
  return "?";
}

PreprocessResources load_preprocess_resources(const ResourcePaths& paths, FilterConfig filter) {
  filter.validate();
  PreprocessResources res;
  res.lexicon = FrequencyLexicon::load(paths.lexicon);
  res.lemmas = LemmaDictionary::load(paths.lemmas);
  res.stopwords = WordSet::load(paths.stopwords);
  res.keepwords = WordSet::load(paths.keepwords);
  if (!paths.index_hashtags.empty()) res.index_hashtags = WordSet::load(paths.index_hashtags);
  if (!paths.spam.empty()) {
    for (auto& p : io::read_list(paths.spam)) filter.spam_phrases.push_back(std::move(p));
  }
  res.filter = std::move(filter);
  return res;
}

FilterDecision filter_relevant(const AnnotatedTweet& tweet, const FilterConfig& config,
                               const FrequencyLexicon& lexicon, const WordSet& index_hashtags) {
  const std::u32string folded = text::fold(text::decode(tweet.text));
  for (const auto& phrase : config.spam_phrases) {
    if (contains_phrase(folded, text::fold(text::decode(text::trim(phrase))))) {
      return {false, DiscardReason::Spam};
    }
  }

  const MarkerExtraction mx = extract_markers(tweet.text);
  const auto body = text::decode(mx.text);
  std::size_t words = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < body.size();) {
    if (!is_word_char(body[i])) {
      ++i;
      continue;
    }
    const std::size_t j = run_end(body, i);
    const std::u32string run = body.substr(i, j - i);
    i = j;
    const bool alphabetic = std::all_of(run.begin(), run.end(), [](char32_t c) { return text::is_letter(c); });
    if (!alphabetic || is_laughter(run)) continue;
    ++words;
    if (lexicon.contains(text::encode(run))) ++hits;
  }
  const double coverage = words == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(words);
  if (coverage < config.language_coverage_threshold) return {false, DiscardReason::Language};

  if (config.require_finance_marker) {
    bool marker = !mx.tickers.empty() || has_quantity(body);
    for (const auto& h : mx.hashtags) marker = marker || index_hashtags.contains(h);
    if (!marker) return {false, DiscardReason::NoFinanceMarker};
  }
  return {true, DiscardReason::Spam};
}

double jaccard_similarity(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

DedupResult deduplicate(std::span<const ProcessedTweet> corpus, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw Error(ErrorKind::InvalidArgument, "dedup threshold must be in [0,1]");
  }
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return corpus[x].id < corpus[y].id; });

  DedupResult result;
  std::vector<std::set<std::string>> kept_sets;
  for (std::size_t idx : order) {
    const auto& t = corpus[idx];
    std::set<std::string> tokens(t.tokens.begin(), t.tokens.end());
    bool dropped = false;
    for (std::size_t s = 0; s < kept_sets.size(); ++s) {
      if (jaccard_similarity(tokens, kept_sets[s]) >= threshold) {
        result.groups[result.survivors[s]].push_back(t.id);
        dropped = true;
        break;
      }
    }
    if (!dropped) {
      result.survivors.push_back(t.id);
      kept_sets.push_back(std::move(tokens));
    }
  }
  return result;
}

std::vector<std::string> split_compound(std::string_view token, const FrequencyLexicon& lexicon) {
  const std::u32string cps = text::decode(token);
  const std::u32string folded = text::fold(cps);
  if (cps.empty() || !std::all_of(folded.begin(), folded.end(), [](char32_t c) { return text::is_letter(c); })) {
    return {std::string(token)};
  }
  if (lexicon.contains(text::encode(folded)) || lexicon.total() == 0) return {std::string(token)};

  constexpr std::size_t kMaxWordLength = 32;
  const double log_total = std::log(static_cast<double>(lexicon.total()));
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const std::size_t n = folded.size();
  std::vector<double> best(n + 1, neg_inf);
  std::vector<std::size_t> back(n + 1, 0);
  best[0] = 0.0;
  for (std::size_t end = 1; end <= n; ++end) {
    const std::size_t first = end > kMaxWordLength ? end - kMaxWordLength : 0;
    for (std::size_t start = first; start < end; ++start) {
      if (best[start] == neg_inf) continue;
      const std::uint64_t f = lexicon.frequency(text::encode(folded.substr(start, end - start)));
      if (f == 0) continue;
      const double score = best[start] + std::log(static_cast<double>(f)) - log_total;
      if (score > best[end]) {
        best[end] = score;
        back[end] = start;
      }
    }
  }
  if (best[n] == neg_inf) return {std::string(token)};
  std::vector<std::string> pieces;
  for (std::size_t end = n; end > 0; end = back[end]) {
    pieces.push_back(text::encode(cps.substr(back[end], end - back[end])));
  }
  std::reverse(pieces.begin(), pieces.end());
  return pieces;
}

std::string correct_spelling(std::string_view token, const FrequencyLexicon& lexicon,
                             std::size_t max_edit) {
  if (max_edit < 1) throw Error(ErrorKind::InvalidArgument, "max_edit must be at least 1");
  const std::u32string cps = text::fold(text::decode(token));
  if (cps.empty() || lexicon.contains(text::encode(cps))) return std::string(token);

  const FrequencyLexicon::Word* best = nullptr;
  std::size_t best_distance = max_edit + 1;
  const std::size_t lo = cps.size() > max_edit ? cps.size() - max_edit : 1;
  for (std::size_t len = lo; len <= cps.size() + max_edit; ++len) {
    for (std::size_t idx : lexicon.words_of_length(len)) {
      const auto& cand = lexicon.word(idx);
      const std::size_t d = text::bounded_levenshtein(cps, cand.cps, max_edit);
      if (d > max_edit) continue;
      if (d >= 2 && cand.cps.front() != cps.front()) continue;
      const bool better =
          best == nullptr || d < best_distance ||
          (d == best_distance && (cand.frequency > best->frequency ||
                                  (cand.frequency == best->frequency && cand.utf8 < best->utf8)));
      if (better) {
        best = &cand;
        best_distance = d;
      }
    }
  }
  return best == nullptr ? std::string(token) : best->utf8;
}

MarkerExtraction extract_markers(std::string_view input) {
  MarkerExtraction mx;
  const auto s = text::decode(input);
  const std::size_t n = s.size();
  std::u32string out;
  out.reserve(n);
  auto add_marker = [&](MarkerKind kind, std::u32string_view value) {
    std::string v = text::encode(value);
    switch (kind) {
      case MarkerKind::Ticker: mx.tickers.push_back(v); break;
      case MarkerKind::Mention: mx.mentions.push_back(v); break;
      case MarkerKind::Hashtag: mx.hashtags.push_back(v); break;
    }
    mx.markers.push_back({kind, std::move(v)});
    out += U' ';
    out += kPlaceholder;
    out += U' ';
  };

  std::size_t i = 0;
  while (i < n) {
    const char32_t c = s[i];
    const bool after_word = i > 0 && is_word_char(s[i - 1]);
    if (!after_word && (starts_with_ci(s, i, U"http://") || starts_with_ci(s, i, U"https://") ||
                        starts_with_ci(s, i, U"www."))) {
      while (i < n && !text::is_space(s[i])) ++i;
      out += U' ';
      continue;
    }
    if (!after_word && c == U'R' && i + 1 < n && s[i + 1] == U'T' &&
        (i + 2 == n || !is_word_char(s[i + 2]))) {
      i += 2;
      if (i < n && s[i] == U':') ++i;
      out += U' ';
      continue;
    }
    if (c == U'$' && i + 1 < n && s[i + 1] >= U'A' && s[i + 1] <= U'Z') {
      std::size_t j = i + 1;
      while (j < n && ((s[j] >= U'A' && s[j] <= U'Z') || text::is_digit(s[j]))) ++j;
      if (j == n || !text::is_letter(s[j])) {
        add_marker(MarkerKind::Ticker, std::u32string_view(s).substr(i + 1, j - i - 1));
        i = j;
        continue;
      }
    }
    if ((c == U'#' || c == U'@') && !after_word && i + 1 < n && is_word_char(s[i + 1])) {
      const std::size_t j = run_end(s, i + 1);
      add_marker(c == U'#' ? MarkerKind::Hashtag : MarkerKind::Mention,
                 std::u32string_view(s).substr(i + 1, j - i - 1));
      i = j;
      continue;
    }
    out += c;
    ++i;
  }
  mx.templated = text::encode(out);
  std::u32string plain;
  plain.reserve(out.size());
  for (char32_t cp : out) {
    if (cp != kPlaceholder) plain += cp;
  }
  mx.text = text::collapse_whitespace(text::encode(plain));
  return mx;
}

bool is_laughter(std::u32string_view word) {
  const std::u32string w = text::fold(word);
  if (w.size() < 4) return false;
  auto consonant = [](char32_t c) { return c == U'j' || c == U'h'; };
  auto vowel = [](char32_t c) { return c == U'a' || c == U'e' || c == U'i'; };
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!consonant(w[i]) && !vowel(w[i])) return false;
    if (i > 0 && consonant(w[i]) == consonant(w[i - 1])) return false;
  }
  for (std::size_t i = 0; i + 3 < w.size(); ++i) {
    if (w[i] == w[i + 2] && w[i + 1] == w[i + 3]) return true;
  }
  return false;
}

QuantityNormalization normalize_quantities_and_laughter(std::string_view input) {
  QuantityNormalization result;
  const auto s = text::decode(input);
  const std::size_t n = s.size();
  std::u32string out;
  out.reserve(n);
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = s[i];
    const bool after_word = i > 0 && is_word_char(s[i - 1]);
    if (text::is_digit(c) && !after_word) {
      bool negative = false;
      if (i > 0 && is_sign(s[i - 1]) && (i == 1 || !is_word_char(s[i - 2]))) {
        negative = s[i - 1] != U'+';
        out.pop_back();
      }
      std::size_t j = i;
      while (j < n && text::is_digit(s[j])) ++j;
      // Decimal/thousand separators, dates, times and ranges stay one quantity.
      while (j + 1 < n &&
             (s[j] == U'.' || s[j] == U',' || s[j] == U'/' || s[j] == U':' || s[j] == U'-') &&
             text::is_digit(s[j + 1])) {
        ++j;
        while (j < n && text::is_digit(s[j])) ++j;
      }
      bool percent = false;
      std::size_t k = j;
      if (k < n && s[k] == U' ') ++k;
      if (k < n && s[k] == U'%') {
        percent = true;
        j = k + 1;
      } else if (starts_with_ci(s, k, U"por ciento") &&
                 (k + 10 >= n || !text::is_letter(s[k + 10]))) {
        percent = true;
        j = k + 10;
      }
      QuantityTag tag;
      if (percent) {
        tag = negative ? QuantityTag::MinusPct : QuantityTag::PlusPct;
      } else {
        tag = negative ? QuantityTag::Minus : QuantityTag::Plus;
      }
      result.quantity_tags.push_back(tag);
      out += negative ? U" - " : U" + ";
      i = j;
      continue;
    }
    if (text::is_letter(c) && !after_word) {
      const std::size_t j = run_end(s, i);
      const std::u32string_view word = std::u32string_view(s).substr(i, j - i);
      if (is_laughter(word)) {
        out += U" LAUGH ";
        ++result.laugh_count;
      } else {
        out += word;
      }
      i = j;
      continue;
    }
    out += c;
    ++i;
  }
  result.text = text::collapse_whitespace(text::encode(out));
  return result;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const WordSet& stoplist, const WordSet& keeplist) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (keeplist.contains(t)) {
      out.push_back(t);
      continue;
    }
    if (stoplist.contains(t) || days_and_months().contains(t)) continue;
    out.push_back(t);
  }
  return out;
}

LemmaResult lemmatize(std::string_view token, const LemmaDictionary& dict) {
  if (const LemmaEntry* e = dict.find(token)) return {e->lemma, e->tense};
  return {std::string(token), Tense::None};
}

bool is_reserved_token(std::string_view token) {
  if (token == kLaughToken) return true;
  return token.size() > kEmojiPrefix.size() && token.rfind(kEmojiPrefix, 0) == 0;
}

ProcessedTweet preprocess_pipeline(const AnnotatedTweet& tweet, const PreprocessResources& res) {
  ProcessedTweet p;
  p.id = tweet.id;

  MarkerExtraction mx = extract_markers(tweet.text);
  p.tickers = mx.tickers;
  for (const auto& t : tweet.tickers) {
    const std::string up = [&] {
      std::string u = t;
      for (auto& ch : u) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      return u;
    }();
    if (std::find(p.tickers.begin(), p.tickers.end(), up) == p.tickers.end()) p.tickers.push_back(up);
  }
  p.mentions = mx.mentions;
  p.hashtags = mx.hashtags;

  // Hashtag and mention splitting, in place.
  std::u32string expanded;
  std::size_t next_marker = 0;
  for (char32_t cp : text::decode(mx.templated)) {
    if (cp == kPlaceholder) {
      expanded += text::decode(marker_replacement(mx.markers[next_marker++], res));
    } else {
      expanded += cp;
    }
  }

  const std::string corrected = correct_words(text::encode(expanded), res);
  const QuantityNormalization qn = normalize_quantities_and_laughter(corrected);
  p.quantity_tags = qn.quantity_tags;
  p.laugh_count = qn.laugh_count;

  Tokenized tk = tokenize(qn.text);
  p.exclamation_count = tk.exclamations;
  p.interrogation_count = tk.interrogations;
  p.emojis = std::move(tk.emojis);

  for (auto& tok : remove_stopwords(tk.tokens, res.stopwords, res.keepwords)) {
    if (is_reserved_token(tok) || tok == "!" || tok == "?" || tok == "+" || tok == "-") {
      p.tokens.push_back(std::move(tok));
      continue;
    }
    LemmaResult lr = lemmatize(tok, res.lemmas);
    ++p.tense_counts[static_cast<std::size_t>(lr.tense)];
    p.tokens.push_back(std::move(lr.lemma));
  }
  p.tense_counts[static_cast<std::size_t>(Tense::None)] = 0;
  return p;
}

}  // namespace oppscreen
