#pragma once

#include <filesystem>
#include <vector>

#include "core/features.hpp"
#include "core/io.hpp"
#include "core/preprocess.hpp"

namespace oppscreen::testing {

inline std::filesystem::path source_dir() { return OPPSCREEN_SOURCE_DIR; }

inline std::filesystem::path resource(const char* name) {
  return source_dir() / "data" / "resources" / name;
}

inline ResourcePaths bundled_paths() {
  ResourcePaths p;
  p.lexicon = resource("es_frequency.tsv");
  p.lemmas = resource("lemmas.tsv");
  p.stopwords = resource("stopwords.txt");
  p.keepwords = resource("keepwords.txt");
  p.spam = resource("spam.txt");
  p.index_hashtags = resource("index_hashtags.txt");
  return p;
}

inline const PreprocessResources& bundled_resources() {
  static const PreprocessResources res = load_preprocess_resources(bundled_paths(), FilterConfig{});
  return res;
}

inline const SentimentLexicons& bundled_lexicons() {
  static const SentimentLexicons lex = SentimentLexicons::load(
      resource("polarity.tsv"), resource("emotion.tsv"), resource("emoji.tsv"), resource("adverbs.txt"));
  return lex;
}

struct Corpus {
  std::vector<ProcessedTweet> tweets;
  std::vector<EmotionLabel> labels;
};

// Bundled synthetic corpus run through the pipeline (every row passes the
// filter and dedup, which the preprocess tests check separately).
inline const Corpus& synthetic_corpus() {
  static const Corpus c = [] {
    Corpus out;
    const auto raw = load_dataset(source_dir() / "data" / "corpus" / "synthetic.jsonl", DatasetFormat::Jsonl);
    for (const auto& t : raw) {
      out.tweets.push_back(preprocess_pipeline(t, bundled_resources()));
      out.labels.push_back(t.emotion);
    }
    return out;
  }();
  return c;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("oppscreen-test-" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oppscreen::testing
