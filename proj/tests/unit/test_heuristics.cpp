#include <doctest.h>

#include <cmath>
#include <random>

#include "curate/core/error.hpp"
#include "curate/core/token_counter.hpp"
#include "curate/heuristics/ngram_lm.hpp"
#include "curate/heuristics/rules.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace curate;

namespace {

const std::string kGood =
    "The history of the river is long and the people of the town have always lived with it.\n"
    "Every spring the water rises and the farmers have to move their animals to the hills.\n"
    "In the summer the children swim in the shallow parts and the old men fish from the bridge.\n"
    "Nobody can remember a year when the river did not change the lives of the people living near it.";

bool keeps(const std::string& rule, std::string_view text, const std::map<std::string, double>& p = {}) {
  return make_rule(rule, p).keep(text);
}

std::vector<std::string> random_corpus(std::mt19937_64& rng, std::size_t docs, std::size_t vocab) {
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1), len(1, 12);
  std::vector<std::string> out;
  for (std::size_t d = 0; d < docs; ++d) {
    std::string t;
    const auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) t += (i ? " w" : "w") + std::to_string(pick(rng));
    out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("a clean paragraph passes every default rule") {
  WhitespaceCounter counter;
  const auto o = apply_heuristics(kGood, default_ruleset(), counter);
  CHECK(o.kept);
  CHECK(o.text == kGood);
  CHECK(o.applied.empty());
}

TEST_CASE("line rules") {
  CHECK(keeps("c4_terminal_punct", "It ends well."));
  CHECK(keeps("c4_terminal_punct", "He said \"yes.\""));
  CHECK_FALSE(keeps("c4_terminal_punct", "Share this page"));
  CHECK(keeps("c4_min_words_per_line", "one two three four five"));
  CHECK_FALSE(keeps("c4_min_words_per_line", "one two three four"));
  CHECK(keeps("c4_min_words_per_line", "one two three", {{"min_words", 3}}));
  CHECK_FALSE(keeps("c4_javascript", "Please enable JavaScript to continue."));
}

TEST_CASE("document rules") {
  CHECK_FALSE(keeps("c4_lorem_ipsum", "Some Lorem Ipsum text."));
  CHECK_FALSE(keeps("c4_curly_bracket", "int main() { return 0; }"));
  CHECK(keeps("c4_min_sentences", "One. Two! Three?"));
  CHECK_FALSE(keeps("c4_min_sentences", "One. Two!"));
  CHECK_FALSE(keeps("c4_min_sentences", ". . . ."));
  CHECK(count_sentences("He left (quickly.) She said \"fine.\" Done…") == 3);
  CHECK(count_sentences("3.5 e.g Mr") == 0);

  CHECK(keeps("gopher_word_count", kGood));
  CHECK_FALSE(keeps("gopher_word_count", "too few words here."));
  CHECK(mean_word_length("ab abcd") == doctest::Approx(3.0));
  CHECK(mean_word_length("\xC3\xA9t\xC3\xA9") == doctest::Approx(3.0));
  CHECK_FALSE(keeps("gopher_mean_word_length", "a b c d e f g"));
  CHECK_FALSE(keeps("gopher_mean_word_length", "internationalization counterrevolutionaries"));
  CHECK(symbol_to_word_ratio("# one two ... three…") == doctest::Approx(3.0 / 5.0));
  CHECK_FALSE(keeps("gopher_symbol_ratio", "#tag #tag words here"));
  CHECK(alpha_word_fraction("abc 123 d4 !!") == doctest::Approx(0.5));
  CHECK_FALSE(keeps("gopher_alpha_words", "1 2 3 4 five"));
  CHECK_FALSE(keeps("gopher_bullet_lines", "- a\n- b\n* c"));
  CHECK(keeps("gopher_bullet_lines", "- a\nplain line"));
  CHECK_FALSE(keeps("gopher_ellipsis_lines", "wait...\nand…\nok."));
  CHECK(distinct_stop_words("The, the THE of") == 2);
  CHECK_FALSE(keeps("gopher_stop_words", "the cat sat"));
}

TEST_CASE("rules are configurable and validated") {
  CHECK(known_rule_names().size() == 13);
  CHECK_THROWS_AS(make_rule("nope"), ConfigError);
  CHECK_THROWS_AS(make_rule("gopher_word_count", {{"min_length", 1}}), ConfigError);
  const auto rules = ruleset_from_json(Json::parse(
      R"([{"name": "c4_terminal_punct", "enabled": false}, {"name": "gopher_word_count", "params": {"min_words": 3}}])"));
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].params.at("min_words") == 3);
  CHECK_THROWS_AS(ruleset_from_json(Json::parse(R"([{"params": {}}])")), ConfigError);
  CHECK_THROWS_AS(ruleset_from_json(Json::parse(R"([{"name": "c4_javascript", "params": {"x": "y"}}])")),
                  ConfigError);
  WhitespaceCounter counter;
  CHECK_THROWS_AS(apply_heuristics("x", {}, counter), Error);
}

TEST_CASE("line rules remove lines before document rules run") {
  WhitespaceCounter counter;
  const auto o = apply_heuristics(kGood + "\nShare this page\n\nClick here", default_ruleset(), counter);
  CHECK(o.kept);
  CHECK(o.text == kGood + "\n");
  REQUIRE(o.applied.size() == 1);
  CHECK(o.applied[0].rule == "c4_terminal_punct");
  CHECK(o.applied[0].lines_dropped == 2);
  CHECK(o.applied[0].tokens_removed == 5);

  const auto few = apply_heuristics(kGood + "\nThanks.", default_ruleset(), counter);
  REQUIRE(few.applied.size() == 1);
  CHECK(few.applied[0].rule == "c4_min_words_per_line");

  const auto gone = apply_heuristics("no terminal punctuation", default_ruleset(), counter);
  CHECK_FALSE(gone.kept);
  CHECK(gone.drop_rule == kEmptyAfterLineRules);
}

TEST_CASE("tightening a document threshold never keeps more documents") {
  std::mt19937_64 rng(11);
  std::vector<std::string> texts;
  for (int i = 0; i < 200; ++i) texts.push_back(test::english_text(rng, 1 + rng() % 6, 1 + rng() % 2));
  const std::vector<std::tuple<std::string, std::string, std::vector<double>>> sweeps = {
      {"gopher_word_count", "min_words", {10, 30, 50, 80, 120}},
      {"gopher_mean_word_length", "min_length", {2, 3, 4, 5}},
      {"gopher_stop_words", "min_count", {1, 2, 4, 6, 8}},
      {"c4_min_sentences", "min_sentences", {1, 3, 5, 9}},
      {"gopher_alpha_words", "min_fraction", {0.5, 0.8, 0.95, 1.0}},
  };
  for (const auto& [rule, param, values] : sweeps) {
    INFO(rule);
    std::vector<bool> prev(texts.size(), true);
    for (double v : values) {
      const auto r = make_rule(rule, {{param, v}});
      for (std::size_t i = 0; i < texts.size(); ++i) {
        const bool k = r.keep(texts[i]);
        CHECK((!k || prev[i]));
        prev[i] = k;
      }
    }
  }
}

TEST_CASE("filter_documents reconciles its report") {
  WhitespaceCounter counter;
  std::vector<Document> docs(3);
  docs[0].id = "good";
  docs[0].text = kGood + "\nShare this page";
  docs[1].id = "lorem";
  docs[1].text = kGood + "\nLorem ipsum dolor sit amet, consectetur adipiscing elit.";
  docs[2].id = "short";
  docs[2].text = "Too short to keep. Really. Yes.";
  for (std::size_t workers : {1, 3}) {
    const auto r = filter_documents(docs, default_ruleset(), counter, workers);
    REQUIRE(r.kept.size() == 1);
    CHECK(r.kept[0].text == kGood);
    REQUIRE(r.dropped.size() == 2);
    CHECK(r.dropped[0].rule == "c4_lorem_ipsum");
    CHECK(r.dropped[1].rule == "gopher_word_count");
    CHECK(r.report.reconciles());
    CHECK(r.report.rules.at("c4_terminal_punct").lines_dropped == 1);
  }
}

TEST_CASE("unigram Kneser-Ney hand-computed values") {
  const std::vector<std::string> corpus = {"a a b"};
  const auto lm = NgramLm::train(corpus, 1);
  CHECK(lm.vocab_size() == 4);
  CHECK(lm.discount(1) == doctest::Approx(0.5));
  CHECK(lm.prob("a", {}) == doctest::Approx(0.46875).epsilon(1e-12));
  CHECK(lm.prob("b", {}) == doctest::Approx(0.21875).epsilon(1e-12));
  CHECK(lm.prob("</s>", {}) == doctest::Approx(0.21875).epsilon(1e-12));
  CHECK(lm.prob("<unk>", {}) == doctest::Approx(0.09375).epsilon(1e-12));
  CHECK(lm.prob("zzz", {}) == lm.prob("<unk>", {}));
}

TEST_CASE("Kneser-Ney distributions sum to one for every observed context") {
  std::mt19937_64 rng(12);
  for (std::size_t order : {1, 2, 3, 4}) {
    const auto corpus = random_corpus(rng, 40, 15);
    const auto lm = NgramLm::train(corpus, order);
    const auto vocab = lm.predicted_vocab();
    std::vector<std::vector<std::string>> histories = {{}, {"<s>"}, {"never", "seen"}};
    for (std::size_t k = 2; k <= order; ++k) {
      for (const auto& [g, c] : lm.counts().grams(k)) {
        std::vector<std::string> h;
        for (std::size_t i = 0; i + 1 < g.size(); ++i) h.push_back(lm.counts().vocab()[g[i]]);
        histories.push_back(h);
      }
    }
    for (const auto& h : histories) {
      double total = 0;
      for (const auto& w : vocab) total += lm.prob(w, h);
      CHECK(std::abs(total - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("Kneser-Ney matches the recursive oracle") {
  std::mt19937_64 rng(13);
  for (std::size_t order : {1, 2, 3, 5}) {
    const auto corpus = random_corpus(rng, 30, 10);
    const auto lm = NgramLm::train(corpus, order);
    const test::KneserNeyOracle oracle(corpus, order);
    auto pv = lm.predicted_vocab();
    auto ov = oracle.predicted_vocab();
    std::sort(pv.begin(), pv.end());
    std::sort(ov.begin(), ov.end());
    CHECK(pv == ov);
    for (const auto& text : random_corpus(rng, 20, 12)) {
      const double a = lm.perplexity(text), b = oracle.perplexity(text);
      CHECK(std::abs(a - b) <= 1e-9 * b);
    }
  }
}

TEST_CASE("uniform model perplexity equals the vocabulary size") {
  const std::vector<std::string> words = {"x", "y", "z", "w", "v"};
  const auto lm = NgramLm::uniform(words);
  const double v = static_cast<double>(lm.vocab_size());
  CHECK(lm.vocab_size() == 7);
  for (const std::string text : {"x", "x y z", "unknown words here v"})
    CHECK(lm.perplexity(text) == doctest::Approx(v).epsilon(1e-12));
  CHECK_THROWS_AS(lm.perplexity(""), Error);
}

TEST_CASE("n-gram counts merge like a single pass and models round trip") {
  std::mt19937_64 rng(14);
  const auto corpus = random_corpus(rng, 50, 20);
  NgramCounts all(3), left(3), right(3);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    all.add_text(corpus[i]);
    (i < 25 ? left : right).add_text(corpus[i]);
  }
  left.merge(right);
  const NgramLm a(all), b(left);
  for (const auto& t : corpus) CHECK(a.perplexity(t) == doctest::Approx(b.perplexity(t)).epsilon(1e-12));
  CHECK(all.total_tokens() == left.total_tokens());

  test::TempDir dir;
  a.save(dir / "lm.bin");
  const auto loaded = NgramLm::load(dir / "lm.bin");
  CHECK(loaded.counts() == a.counts());
  for (const auto& t : corpus) CHECK(loaded.perplexity(t) == a.perplexity(t));
  test::write_file(dir / "bad.bin", "garbage");
  CHECK_THROWS_AS(NgramLm::load(dir / "bad.bin"), Error);
}

TEST_CASE("nearest-rank quantile and calibrated threshold") {
  CHECK(nearest_rank_quantile({5, 1, 3, 2, 4}, 0.5) == 3);
  CHECK(nearest_rank_quantile({5, 1, 3, 2, 4}, 1.0) == 5);
  CHECK(nearest_rank_quantile({5, 1, 3, 2, 4}, 0.01) == 1);
  CHECK_THROWS_AS(nearest_rank_quantile({}, 0.5), Error);
  CHECK_THROWS_AS(nearest_rank_quantile({1}, 0.0), Error);

  std::mt19937_64 rng(15);
  std::vector<std::string> corpus;
  for (int i = 0; i < 100; ++i) corpus.push_back(test::english_text(rng, 2));
  const auto cal = train_calibrated_lm(corpus, 3);
  CHECK(cal.holdout_docs == 10);
  std::vector<double> ppl;
  for (std::size_t i = 9; i < corpus.size(); i += 10) ppl.push_back(cal.lm.perplexity(corpus[i]));
  CHECK(cal.threshold == nearest_rank_quantile(ppl, 0.9));

  WhitespaceCounter counter;
  std::vector<Document> docs(2);
  docs[0].id = "en";
  docs[0].text = test::english_text(rng, 2);
  docs[1].id = "junk";
  docs[1].text = test::gibberish_text(rng, 2);
  const auto r = perplexity_filter_documents(docs, cal.lm, cal.threshold * 2, counter);
  REQUIRE(r.kept.size() == 1);
  CHECK(r.kept[0].id == "en");
  CHECK(r.dropped[0].rule == "perplexity");
  CHECK(r.report.reconciles());
  CHECK_THROWS_AS(perplexity_keep(cal.lm, "x", 0.0), Error);
}
