#include <algorithm>
#include <random>
#include <set>

#include "core/corpus.hpp"
#include "core/io.hpp"
#include "core/preprocess.hpp"
#include "core/random.hpp"
#include "core/text.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace oppscreen;
using oppscreen::testing::bundled_resources;

namespace {

AnnotatedTweet tweet(std::string text, std::int64_t id = 1) {
  AnnotatedTweet t;
  t.id = id;
  t.text = std::move(text);
  return t;
}

std::string joined(const ProcessedTweet& p) { return text::join(p.tokens, " "); }

ProcessedTweet processed(std::int64_t id, std::vector<std::string> tokens) {
  ProcessedTweet p;
  p.id = id;
  p.tokens = std::move(tokens);
  return p;
}

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("worked example before/after pairs reproduce token-exactly") {
  const auto& res = bundled_resources();
  const auto rows = load_dataset(oppscreen::testing::source_dir() / "data/corpus/worked_examples.jsonl",
                                 DatasetFormat::Jsonl);
  REQUIRE(rows.size() == 4);
  const char* expected[] = {
      "continuar subir cuidado señor ! mantener precaución apenas inicio observar !",
      "ir año + - -",
      "poco humor LAUGH",
      "truncar racha bajista animar firma acuerdo comercial vía valencia plaza",
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CAPTURE(i);
    CHECK(joined(preprocess_pipeline(rows[i], res)) == expected[i]);
  }
}

TEST_CASE("pipeline side channels on the worked examples") {
  const auto& res = bundled_resources();
  const auto p2 = preprocess_pipeline(
      tweet("En lo que va de año:$IBEX: +2.26% $STXE (Eurostoxx Telecom): -2.9% $TEF: -16.75% "
            "https://t.co/uHXa13LqoH"),
      res);
  CHECK(p2.tickers == std::vector<std::string>{"IBEX", "STXE", "TEF"});
  CHECK(p2.quantity_tags ==
        std::vector<QuantityTag>{QuantityTag::PlusPct, QuantityTag::MinusPct, QuantityTag::MinusPct});
  CHECK(p2.tense_counts[static_cast<std::size_t>(Tense::Present)] == 1);

  const auto p3 = preprocess_pipeline(
      tweet("#dow #sp500 #nasdaq #dax un poco de humor. Jajaja https://t.co/ecKayZEcw6"), res);
  CHECK(p3.laugh_count == 1);
  CHECK(p3.hashtags.size() == 4);

  const auto p1 = preprocess_pipeline(
      tweet("$VIX continúa subiendo... Mucho cuidado señores! Mantengan precausion apenas estamos "
            "a inicio de semana, observemos!"),
      res);
  CHECK(p1.exclamation_count == 2);
  CHECK(p1.interrogation_count == 0);
}

TEST_CASE("empty text yields empty tokens and zero counters") {
  const auto p = preprocess_pipeline(tweet(""), bundled_resources());
  CHECK(p.tokens.empty());
  CHECK(p.laugh_count == 0);
  CHECK(p.exclamation_count == 0);
  CHECK(p.quantity_tags.empty());
  CHECK(p.tense_counts == std::array<std::uint32_t, 5>{});
}

TEST_CASE("emoji become named tokens") {
  const auto p = preprocess_pipeline(tweet("$TSLA a la luna \xF0\x9F\x9A\x80\xF0\x9F\x9A\x80 :)"),
                                     bundled_resources());
  CHECK(p.emojis == std::vector<std::string>{"rocket", "rocket", "slightly_smiling_face"});
  CHECK(std::count(p.tokens.begin(), p.tokens.end(), "EMOJI_rocket") == 2);
}

TEST_CASE("processed output satisfies the token invariants") {
  const auto& res = bundled_resources();
  const std::string texts[] = {
      "RT @trader: $SAN sube un 3% hoy!! https://x.co/abc #ibex35",
      "¿Qué pasa con $BBVA? Cae -4,5% en la sesión del lunes",
      "jajajaja el $ITX 12/03 a 34.5 euros, podría subir +10 por ciento",
  };
  for (const auto& t : texts) {
    const auto p = preprocess_pipeline(tweet(t), res);
    for (const auto& tok : p.tokens) {
      CAPTURE(tok);
      CHECK(tok.find_first_of("$@#") == std::string::npos);
      CHECK(tok.find("http") == std::string::npos);
      CHECK_FALSE(std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }));
      if (!res.keepwords.contains(tok)) CHECK_FALSE(res.stopwords.contains(tok));
    }
  }
}

TEST_CASE("pipeline is idempotent on its own output") {
  const auto& res = bundled_resources();
  const auto rows = load_dataset(oppscreen::testing::source_dir() / "data/corpus/worked_examples.jsonl",
                                 DatasetFormat::Jsonl);
  std::vector<AnnotatedTweet> inputs(rows.begin(), rows.end());
  inputs.push_back(tweet("$TSLA a la luna \xF0\x9F\x9A\x80 subiría mucho, jejeje!"));
  inputs.push_back(tweet("Cuidado con $SAN: -3% y riesgo de caída fuerte ¿vender?"));
  for (const auto& t : inputs) {
    const auto once = preprocess_pipeline(t, res);
    const auto twice = preprocess_pipeline(tweet(joined(once)), res);
    CAPTURE(t.text);
    CHECK(twice.tokens == once.tokens);
  }
}

TEST_CASE("filter_relevant") {
  const auto& res = bundled_resources();
  FilterConfig cfg = res.filter;
  SUBCASE("spam phrase") {
    auto d = filter_relevant(tweet("Hola! ¿quieres ganar dinero? $IBEX 5%"), cfg, res.lexicon,
                             res.index_hashtags);
    CHECK_FALSE(d.keep);
    CHECK(d.reason == DiscardReason::Spam);
  }
  SUBCASE("finance marker and in-lexicon words") {
    auto d = filter_relevant(tweet("El $IBEX sube un 2%"), cfg, res.lexicon, res.index_hashtags);
    CHECK(d.keep);
  }
  SUBCASE("english text") {
    // none of buy/now/great/stock are in the Spanish lexicon: coverage 0/4
    for (const char* w : {"buy", "now", "great", "stock"}) CHECK_FALSE(res.lexicon.contains(w));
    auto d = filter_relevant(tweet("buy now great stock"), cfg, res.lexicon, res.index_hashtags);
    CHECK_FALSE(d.keep);
    CHECK(d.reason == DiscardReason::Language);
  }
  SUBCASE("no finance marker") {
    auto d = filter_relevant(tweet("hoy hace buen día https://t.co/x"), cfg, res.lexicon,
                             res.index_hashtags);
    CHECK_FALSE(d.keep);
    CHECK(d.reason == DiscardReason::NoFinanceMarker);
    cfg.require_finance_marker = false;
    CHECK(filter_relevant(tweet("hoy hace buen día"), cfg, res.lexicon).keep);
  }
  SUBCASE("index hashtag counts as a marker") {
    CHECK(filter_relevant(tweet("el #Ibex35 abre en verde"), cfg, res.lexicon, res.index_hashtags)
              .keep);
  }
}

TEST_CASE("filter config validation") {
  FilterConfig cfg;
  cfg.jaccard_threshold = 1.5;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("jaccard_similarity") {
  CHECK(jaccard_similarity({"a", "b"}, {"a", "b"}) == 1.0);
  CHECK(jaccard_similarity({"a"}, {"b"}) == 0.0);
  CHECK(jaccard_similarity({"a", "b", "c"}, {"b", "c", "d"}) == 0.5);
  CHECK(jaccard_similarity({}, {}) == 1.0);
}

TEST_CASE("jaccard is symmetric and 1 exactly for equal sets") {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::set<std::string> a, b;
    for (int i = 0; i < 6; ++i) {
      if (rng.index(2)) a.insert(std::string(1, static_cast<char>('a' + i)));
      if (rng.index(2)) b.insert(std::string(1, static_cast<char>('a' + i)));
    }
    const double ab = jaccard_similarity(a, b);
    CHECK(ab == jaccard_similarity(b, a));
    CHECK((ab == 1.0) == (a == b));
  }
}

TEST_CASE("deduplicate") {
  SUBCASE("identical texts") {
    std::vector<ProcessedTweet> c{processed(1, {"a", "b"}), processed(2, {"a", "b"})};
    auto r = deduplicate(c, 0.75);
    CHECK(r.survivors == std::vector<std::int64_t>{1});
    CHECK(r.groups.at(1) == std::vector<std::int64_t>{2});
  }
  SUBCASE("all below threshold") {
    std::vector<ProcessedTweet> c{processed(1, {"a"}), processed(2, {"b"}), processed(3, {"c"})};
    CHECK(deduplicate(c, 0.75).survivors.size() == 3);
  }
  SUBCASE("chain compares against survivors only") {
    // J(A,B)=4/5, J(B,C)=5/6, J(A,C)=4/6
    std::vector<ProcessedTweet> c{processed(3, {"a", "b", "c", "d", "e", "f"}),
                                  processed(1, {"a", "b", "c", "d"}),
                                  processed(2, {"a", "b", "c", "d", "e"})};
    auto r = deduplicate(c, 0.75);
    CHECK(r.survivors == std::vector<std::int64_t>{1, 3});
    CHECK(r.groups.at(1) == std::vector<std::int64_t>{2});
  }
  SUBCASE("bad threshold") { CHECK_THROWS(deduplicate({}, -0.1)); }
}

TEST_CASE("split_compound") {
  const auto& lex = bundled_resources().lexicon;
  CHECK(split_compound("acuerdocomercial", lex) == std::vector<std::string>{"acuerdo", "comercial"});
  CHECK(split_compound("valenciaplaza", lex) == std::vector<std::string>{"valencia", "plaza"});
  CHECK(split_compound("ibex", lex) == std::vector<std::string>{"ibex"});
  CHECK(split_compound("xqzv", lex) == std::vector<std::string>{"xqzv"});
  CHECK(split_compound("AcuerdoComercial", lex) ==
        std::vector<std::string>{"Acuerdo", "Comercial"});
}

TEST_CASE("split_compound output concatenates back to the input") {
  const auto& lex = bundled_resources().lexicon;
  for (const char* t : {"acuerdocomercial", "bolsamercado", "subidafuerte", "zzz", "ibex35",
                        "oportunidaddecompra", "MercadoContinuo"}) {
    std::string cat;
    for (const auto& p : split_compound(t, lex)) cat += p;
    CHECK(cat == t);
  }
}

TEST_CASE("correct_spelling") {
  const auto& lex = bundled_resources().lexicon;
  CHECK(correct_spelling("precausion", lex) == "precaución");
  CHECK(correct_spelling("mercado", lex) == "mercado");

  FrequencyLexicon small;
  small.add("mercado", 100);
  small.add("mercados", 10);
  // both at distance 1; the more frequent wins
  CHECK(correct_spelling("mercadp", small) == "mercado");
  CHECK(correct_spelling("qqqqqqqq", small) == "qqqqqqqq");
  CHECK_THROWS(correct_spelling("x", small, 0));
}

TEST_CASE("correct_spelling returns an in-lexicon word or its input") {
  const auto& lex = bundled_resources().lexicon;
  Rng rng(11);
  const std::string alphabet = "abcdeilmnorstu";
  for (int i = 0; i < 300; ++i) {
    std::string w;
    const std::size_t len = 3 + rng.index(6);
    for (std::size_t k = 0; k < len; ++k) w.push_back(alphabet[rng.index(alphabet.size())]);
    const std::string out = correct_spelling(w, lex);
    CHECK((out == w || lex.contains(out)));
  }
}

TEST_CASE("extract_markers") {
  auto m = extract_markers("$VIX continúa subiendo");
  CHECK(m.tickers == std::vector<std::string>{"VIX"});
  CHECK(m.text == "continúa subiendo");

  m = extract_markers("El #Ibex35 trunca la racha https://t.co/x vía @valenciaplaza");
  CHECK(m.hashtags == std::vector<std::string>{"Ibex35"});
  CHECK(m.mentions == std::vector<std::string>{"valenciaplaza"});
  CHECK(m.text == "El trunca la racha vía");

  m = extract_markers("sin marcas aquí");
  CHECK(m.text == "sin marcas aquí");
  CHECK(m.tickers.empty());
  CHECK(m.mentions.empty());
  CHECK(m.hashtags.empty());

  m = extract_markers("RT: algo $low usuario@correo");
  CHECK(m.text == "algo $low usuario@correo");
  CHECK(m.tickers.empty());
  CHECK(m.mentions.empty());
}

TEST_CASE("normalize_quantities_and_laughter") {
  auto q = normalize_quantities_and_laughter("+2.26% algo -2.9% otro -16.75%");
  CHECK(q.text == "+ algo - otro -");
  CHECK(q.quantity_tags ==
        std::vector<QuantityTag>{QuantityTag::PlusPct, QuantityTag::MinusPct, QuantityTag::MinusPct});

  q = normalize_quantities_and_laughter("Jajaja");
  CHECK(q.text == "LAUGH");
  CHECK(q.laugh_count == 1);

  q = normalize_quantities_and_laughter("texto sin nada");
  CHECK(q.text == "texto sin nada");
  CHECK(q.quantity_tags.empty());

  q = normalize_quantities_and_laughter("cotiza a 12,5 euros y baja 3 por ciento");
  CHECK(q.text == "cotiza a + euros y baja +");
  CHECK(q.quantity_tags == std::vector<QuantityTag>{QuantityTag::Plus, QuantityTag::PlusPct});
}

TEST_CASE("laughter predicate") {
  CHECK(is_laughter(U"jajaja"));
  CHECK(is_laughter(U"JEJE"));
  CHECK(is_laughter(U"hahaha"));
  CHECK_FALSE(is_laughter(U"hija"));
  CHECK_FALSE(is_laughter(U"jaj"));
  CHECK_FALSE(is_laughter(U"jamón"));
}

TEST_CASE("remove_stopwords") {
  const WordSet stop{"el", "lunes", "no"};
  const WordSet keep{"no"};
  CHECK(remove_stopwords({"no", "sube", "el", "lunes"}, stop, keep) ==
        std::vector<std::string>{"no", "sube"});
  CHECK(remove_stopwords({}, stop, keep).empty());
  // days and months go even when missing from the list
  CHECK(remove_stopwords({"marzo", "sube"}, WordSet{}, WordSet{}) == std::vector<std::string>{"sube"});
}

TEST_CASE("lemmatize") {
  const auto& dict = bundled_resources().lemmas;
  auto r = lemmatize("subiendo", dict);
  CHECK(r.lemma == "subir");
  CHECK(r.tense == Tense::None);
  r = lemmatize("continúa", dict);
  CHECK(r.lemma == "continuar");
  CHECK(r.tense == Tense::Present);
  r = lemmatize("subiría", dict);
  CHECK(r.tense == Tense::Conditional);
  r = lemmatize("xyzzy", dict);
  CHECK(r.lemma == "xyzzy");
  CHECK(r.tense == Tense::None);
}

TEST_CASE("bundled lemma dictionary is closed under lemmatization") {
  const auto& res = bundled_resources();
  for (const auto& [surface, entry] : res.lemmas.entries()) {
    CAPTURE(surface);
    CHECK(res.lexicon.contains(entry.lemma));
    CHECK_FALSE(res.stopwords.contains(entry.lemma));
    CHECK(lemmatize(entry.lemma, res.lemmas).lemma == entry.lemma);
  }
}

}  // TEST_SUITE
