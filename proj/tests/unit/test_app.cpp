#include <map>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "core/error.hpp"
#include "core/io.hpp"
#include "core/processed.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace oppscreen;
using namespace oppscreen::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

// Bundled resources and the given dataset, writing under `out`.
ConfigDocument base_config(const fs::path& dataset, const fs::path& out) {
  ConfigDocument doc;
  doc.set("seed", "5");
  doc.set("out", out.string());
  doc.set("dataset.path", dataset.string());
  doc.set("resources.dir", (source_dir() / "data" / "resources").string());
  return doc;
}

std::vector<std::string> joined_tokens(const fs::path& processed) {
  std::vector<std::string> out;
  for (const auto& r : load_processed(processed)) {
    std::string s;
    for (const auto& t : r.tweet.tokens) s += (s.empty() ? "" : " ") + t;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_SUITE("app") {

TEST_CASE("config file syntax") {
  ConfigDocument doc;
  doc.parse(R"(
# comment
seed = 42
out = "results"   # trailing comment

[train]
algorithm = svc
trees = 7
bootstrap = false

[grams.word]
max_df = 0.4

[cascade]
depth = "auto"
candidates = [0.6,
              0.8]   # continues over two lines

[layer3]
trees = 200
)",
            "test.toml", "/base");
  CHECK(doc.get("seed") == 42);
  CHECK(doc.get("out") == "/base/results");
  CHECK(doc.get("train.algorithm") == "svc");
  CHECK(doc.get("train.bootstrap") == false);
  CHECK(doc.get("grams.word.max_df") == 0.4);
  CHECK(doc.get("cascade.candidates") == json::array({0.6, 0.8}));
  CHECK(doc.origin("train.trees") == "test.toml:8");
  CHECK(doc.is_default("train.lambda"));

  const auto rc = resolve(doc);
  CHECK(rc.seed == 42);
  CHECK(rc.cascade.train[0].algorithm == Algorithm::SVC);
  CHECK(rc.cascade.train[0].trees == 7);
  CHECK(rc.cascade.train[2].trees == 200);
  CHECK(rc.cascade.features[0].words.max_df == 0.4);
  CHECK(rc.depth.automatic);
  CHECK(rc.processed == fs::path("/base/results/processed.jsonl"));
  CHECK(rc.model == fs::path("/base/results/model"));
}

TEST_CASE("config errors name file and line") {
  ConfigDocument doc;
  CHECK(error_of([&] { doc.parse("seed = 1\n[train]\ntres = 5\n", "a.toml", ""); }).find("a.toml:3") == 0);
  CHECK(error_of([&] { doc.parse("seed = 1\n[train]\ntres = 5\n", "a.toml", ""); }).find("train.tres") !=
        std::string::npos);
  CHECK(error_of([&] { doc.parse("[cascade]\ndepth = [1\n", "b.toml", ""); }).find("b.toml:2") == 0);
  CHECK(error_of([&] { doc.parse("just words\n", "c.toml", ""); }).find("c.toml:1") == 0);
  CHECK(error_of([&] { doc.parse("[train]\ntrees = -3\n", "d.toml", ""); }).find("d.toml:2") == 0);
  CHECK(error_of([&] { doc.parse("[train]\nbootstrap = maybe\n", "e.toml", ""); }).find("expected true or false") !=
        std::string::npos);
}

TEST_CASE("seed is mandatory") {
  ConfigDocument doc;
  CHECK(error_of([&] { resolve(doc); }).find("seed is required") != std::string::npos);
}

TEST_CASE("precedence: defaults < file < env < flags") {
  ConfigDocument doc;
  CHECK(doc.get("train.trees") == 100);
  doc.parse("seed = 1\n[train]\ntrees = 10\nepochs = 5\n", "f.toml", "");
  CHECK(doc.get("train.trees") == 10);
  const std::map<std::string, std::string> env{{"OPPSCREEN_TRAIN_TREES", "20"}, {"OPPSCREEN_OUT", "2020"}};
  doc.apply_env([&](const char* name) -> const char* {
    const auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  CHECK(doc.get("train.trees") == 20);
  CHECK(doc.get("train.epochs") == 5);
  CHECK(doc.origin("train.trees") == "env OPPSCREEN_TRAIN_TREES");
  // a numeric-looking path stays a path
  CHECK(doc.get("out") == "2020");
  doc.set("train.trees", "30", "--set train.trees");
  CHECK(doc.get("train.trees") == 30);
  CHECK(resolve(doc).cascade.train[1].trees == 30);
  CHECK(ConfigDocument::env_name("grams.char_wb.max_df") == "OPPSCREEN_GRAMS_CHAR_WB_MAX_DF");
}

TEST_CASE("resolve rejects bad values with the key and origin") {
  auto doc = ConfigDocument();
  doc.set("seed", "1");
  doc.set("train.algorithm", "forest", "--set train.algorithm");
  const auto msg = error_of([&] { resolve(doc); });
  CHECK(msg.find("train.algorithm (--set train.algorithm)") == 0);

  ConfigDocument d2;
  d2.set("seed", "1");
  d2.set("experiment.protocols", "1,5");
  CHECK(error_of([&] { resolve(d2); }).find("experiment.protocols") == 0);

  ConfigDocument d3;
  d3.set("seed", "1");
  d3.set("cascade.depth", "1.5");
  CHECK(error_of([&] { resolve(d3); }).find("cascade.depth") == 0);

  CHECK(error_of([&] { d3.set("no.such.key", "1"); }).find("unknown key") != std::string::npos);
}

TEST_CASE("bundled default config resolves") {
  ConfigDocument doc;
  doc.load_file(source_dir() / "data" / "config" / "default.toml");
  const auto rc = resolve(doc);
  CHECK(fs::exists(*rc.dataset));
  CHECK(fs::exists(rc.preprocess_paths.lexicon));
  CHECK(fs::exists(rc.adverbs));
  CHECK(rc.protocols == std::vector<int>{1, 4});
  CHECK(rc.grid.size() == 4);  // the shipped vectorizer grid
}

TEST_CASE("dataset parsing with optional labels") {
  const std::string jsonl = R"({"id": 1, "text": "sube $SAN"}
{"id": 2, "text": "baja $BBVA", "emotion": "A-"}
)";
  CHECK_THROWS_AS(parse_dataset(jsonl, DatasetFormat::Jsonl), Error);
  const auto rows = parse_dataset(jsonl, DatasetFormat::Jsonl, "x", false);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].labeled);
  CHECK(rows[1].labeled);
  CHECK(format_dataset(rows, DatasetFormat::Jsonl).find("\"emotion\"") == format_dataset(rows, DatasetFormat::Jsonl).rfind("\"emotion\""));

  const auto csv = parse_dataset("id,text,tickers\n7,sube,SAN\n", DatasetFormat::Csv, "y", false);
  REQUIRE(csv.size() == 1);
  CHECK_FALSE(csv[0].labeled);
  CHECK_THROWS_AS(parse_dataset("id,text,tickers\n7,sube,SAN\n", DatasetFormat::Csv), Error);
}

TEST_CASE("processed rows round trip") {
  LabeledTweet row;
  row.tweet.id = 9;
  row.tweet.tokens = {"subir", "!"};
  row.tweet.tickers = {"SAN"};
  row.tweet.quantity_tags = {QuantityTag::PlusPct};
  row.tweet.exclamation_count = 1;
  row.tweet.tense_counts[static_cast<std::size_t>(Tense::Future)] = 2;
  row.emotion = EmotionLabel::Opportunity;
  LabeledTweet bare;
  bare.tweet.id = 10;
  const std::vector<LabeledTweet> rows{row, bare};
  const auto back = parse_processed(format_processed(rows), "mem");
  REQUIRE(back.size() == 2);
  CHECK(back[0].tweet == row.tweet);
  CHECK(back[0].emotion == EmotionLabel::Opportunity);
  CHECK_FALSE(back[1].emotion);
  std::vector<ProcessedTweet> tweets;
  std::vector<EmotionLabel> labels;
  CHECK_THROWS_AS(split_labeled(back, tweets, labels), Error);
  CHECK(error_of([] { parse_processed("{\"id\": 1, \"tokens\": []}\n{oops\n", "p.jsonl"); }).find("p.jsonl:2") == 0);
}

TEST_CASE("preprocess command on the worked examples") {
  TempDir dir("cmd-worked");
  const auto rc = resolve(base_config(source_dir() / "data" / "corpus" / "worked_examples.jsonl", dir.path()));
  const auto summary = run_preprocess(rc);
  CHECK(summary["kept"] == 4);
  CHECK(joined_tokens(rc.processed) ==
        std::vector<std::string>{"continuar subir cuidado señor ! mantener precaución apenas inicio observar !",
                                 "ir año + - -", "poco humor LAUGH",
                                 "truncar racha bajista animar firma acuerdo comercial vía valencia plaza"});
}

TEST_CASE("preprocess command logs duplicates and filtered tweets") {
  TempDir dir("cmd-dup");
  const fs::path data = dir.path() / "dup.jsonl";
  io::write_file_atomic(data,
                        R"({"id": 1, "text": "$SAN sube con fuerza hoy", "emotion": "S+"}
{"id": 2, "text": "$SAN sube con fuerza hoy", "emotion": "S+"}
{"id": 3, "text": "qwrty zxcvb plmok", "emotion": "N"}
)");
  const auto rc = resolve(base_config(data, dir.path() / "out"));
  const auto summary = run_preprocess(rc);
  CHECK(summary["kept"] == 1);
  CHECK(summary["reasons"]["duplicate"] == 1);
  const auto log = io::read_file(dir.path() / "out" / "discards.jsonl");
  CHECK(log.find(R"({"duplicate_of":1,"id":2,"reason":"duplicate"})") != std::string::npos);
  CHECK(log.find(R"("id":3)") != std::string::npos);
}

TEST_CASE("synthetic corpus: every class survives preprocessing") {
  TempDir dir("cmd-synth");
  const auto rc = resolve(base_config(source_dir() / "data" / "corpus" / "synthetic.jsonl", dir.path()));
  const auto summary = run_preprocess(rc);
  for (const char* c : {"S+", "P+", "N", "A-"}) CHECK(summary["classes"][c].get<int>() >= 1);
  CHECK(summary["kept"] == 500);
}

TEST_CASE("train, classify, experiment and report commands") {
  TempDir dir("cmd-flow");
  auto doc = base_config(source_dir() / "data" / "corpus" / "synthetic.jsonl", dir.path());
  doc.set("train.trees", "5");
  doc.set("experiment.folds", "2");
  doc.set("experiment.protocols", "[1, 4]");
  auto rc = resolve(doc);
  run_preprocess(rc);

  const auto trained = run_train(rc);
  CHECK(trained["depth"] == 0.75);
  CHECK(fs::exists(rc.model / "cascade.json"));

  doc.set("classify.input", (source_dir() / "data" / "corpus" / "synthetic.jsonl").string());
  rc = resolve(doc);
  const auto classified = run_classify(rc);
  CHECK(classified["classified"] == 500);
  const auto content = io::read_file(dir.path() / "classified.jsonl");
  std::vector<json> rows;
  for (std::size_t pos = 0; pos < content.size();) {
    const auto end = content.find('\n', pos);
    rows.push_back(json::parse(content.substr(pos, end - pos)));
    pos = end + 1;
  }
  REQUIRE(rows.size() == 500);
  // P+ first, by final-layer confidence
  std::size_t flagged = 0;
  while (flagged < rows.size() && rows[flagged]["label"] == "P+") ++flagged;
  CHECK(flagged == classified["flagged"].get<std::size_t>());
  for (std::size_t i = flagged; i < rows.size(); ++i) CHECK(rows[i]["label"] != "P+");
  for (std::size_t i = 1; i < flagged; ++i) {
    CHECK(rows[i - 1]["confidences"].back().get<double>() >= rows[i]["confidences"].back().get<double>());
  }
  CHECK(fs::exists(dir.path() / "tickers.csv"));

  SUBCASE("depth 1 flags nothing") {
    doc.set("classify.depth", "1");
    CHECK(run_classify(resolve(doc))["flagged"] == 0);
  }

  const auto exp = run_experiment(rc);
  CHECK(exp["runs"].size() == 2);
  CHECK(fs::exists(dir.path() / "experiment-p1.json"));
  CHECK(fs::exists(dir.path() / "depth-sweep-p4.csv"));
  CHECK_FALSE(fs::exists(dir.path() / "depth-sweep-p1.csv"));
  CHECK(fs::exists(dir.path() / "delta-p1-p4.txt"));
  CHECK(io::read_file(dir.path() / "experiment-p4.txt").find("Depth") != std::string::npos);

  const auto rep = run_report(rc);
  CHECK(rep["coverage"].size() == 2);
  CHECK(rep["text"].get<std::string>().find("Improvement from test 1 to test 4") != std::string::npos);

  CHECK(error_of([&] { run_experiment(rc, {5}); }).find("protocol must be") == 0);
}

TEST_CASE("commands report missing inputs") {
  TempDir dir("cmd-missing");
  auto rc = resolve(base_config(dir.path() / "nope.jsonl", dir.path()));
  const auto msg = error_of([&] { run_preprocess(rc); });
  CHECK(msg.find("nope.jsonl") != std::string::npos);
  CHECK(error_of([&] { run_train(rc); }).find("processed.jsonl does not exist") != std::string::npos);
}

}  // TEST_SUITE
