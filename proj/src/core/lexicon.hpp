#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace oppscreen {

// word -> corpus frequency. Keys are case-folded on insertion; accents are kept.
class FrequencyLexicon {
 public:
  struct Word {
    std::u32string cps;
    std::string utf8;
    std::uint64_t frequency = 0;
  };

  FrequencyLexicon() = default;

  static FrequencyLexicon parse(std::string_view tsv, std::string_view source = "<memory>");
  static FrequencyLexicon load(const std::filesystem::path& path);

  // Adds to the frequency of an existing entry.
  void add(std::string_view word, std::uint64_t frequency);

  bool contains(std::string_view word) const;
  std::uint64_t frequency(std::string_view word) const;
  std::uint64_t total() const { return total_; }
  std::size_t size() const { return index_.size(); }

  const Word& word(std::size_t i) const { return words_[i]; }
  // Indices of the words whose length in code points is exactly len.
  const std::vector<std::size_t>& words_of_length(std::size_t len) const;

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Word> words_;
  std::map<std::size_t, std::vector<std::size_t>> by_length_;
  std::uint64_t total_ = 0;
};

enum class Tense : std::uint8_t { None = 0, Past, Present, Future, Conditional };

std::string_view tense_name(Tense t);
std::optional<Tense> parse_tense(std::string_view s);

struct LemmaEntry {
  std::string lemma;
  std::string pos;
  Tense tense = Tense::None;
};

// surface form -> (lemma, POS, tense); surface keys are case-folded.
class LemmaDictionary {
 public:
  static LemmaDictionary parse(std::string_view tsv, std::string_view source = "<memory>");
  static LemmaDictionary load(const std::filesystem::path& path);

  // A second entry for the same surface form is an error.
  void add(std::string_view surface, LemmaEntry entry);
  const LemmaEntry* find(std::string_view surface) const;
  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, LemmaEntry>& entries() const { return entries_; }

 private:
  std::unordered_map<std::string, LemmaEntry> entries_;
};

// Case-folded word set for stop/keep/spam/index lists.
class WordSet {
 public:
  WordSet() = default;
  WordSet(std::initializer_list<std::string_view> words);
  static WordSet load(const std::filesystem::path& path);

  void insert(std::string_view w);
  bool contains(std::string_view w) const;
  std::size_t size() const { return words_.size(); }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
};

}  // namespace oppscreen
