#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "curate/core/error.hpp"
#include "curate/core/token_counter.hpp"
#include "curate/dedup/exact_dedup.hpp"
#include "curate/dedup/fuzzy_dedup.hpp"
#include "curate/dedup/minhash.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace curate;

namespace {

std::vector<std::uint32_t> random_tokens(std::mt19937_64& rng, std::size_t n, std::uint32_t alphabet) {
  std::uniform_int_distribution<std::uint32_t> pick(0, alphabet - 1);
  std::vector<std::uint32_t> out(n);
  for (auto& x : out) x = pick(rng);
  return out;
}

Document doc(const std::string& id, const std::string& text) {
  Document d;
  d.id = id;
  d.snapshot = "CC-MAIN-2024-10";
  d.text = text;
  return d;
}

}  // namespace

TEST_CASE("suffix array matches a naive sort and LCP matches direct comparison") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_tokens(rng, 1 + rng() % 300, 1 + rng() % 5);
    std::vector<std::uint32_t> naive(s.size());
    std::iota(naive.begin(), naive.end(), 0u);
    std::sort(naive.begin(), naive.end(), [&](auto a, auto b) {
      return std::lexicographical_compare(s.begin() + a, s.end(), s.begin() + b, s.end());
    });
    const auto sa = suffix_array(s);
    REQUIRE(sa == naive);
    const auto lcp = lcp_array(s, sa);
    CHECK(lcp[0] == 0);
    for (std::size_t i = 1; i < sa.size(); ++i) {
      std::uint32_t l = 0;
      while (sa[i - 1] + l < s.size() && sa[i] + l < s.size() && s[sa[i - 1] + l] == s[sa[i] + l]) ++l;
      CHECK(lcp[i] == l);
    }
  }
}

TEST_CASE("duplicate mask equals the brute-force oracle on random corpora") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<std::uint32_t>> docs(1 + rng() % 6);
    for (auto& d : docs) d = random_tokens(rng, rng() % 60, 2 + rng() % 4);
    const std::size_t m = 2 + rng() % 6;
    CHECK(duplicate_token_mask(docs, m) == test::brute_duplicate_mask(docs, m));
  }
  CHECK_THROWS_AS(duplicate_token_mask({{1, 2}}, 1), Error);
}

TEST_CASE("repeated spans are removed from all but the first occurrence") {
  const std::string shared = "alpha beta gamma delta epsilon zeta eta theta";
  std::vector<Document> docs = {doc("a", "one two " + shared + " three"), doc("b", "four " + shared),
                                doc("c", shared)};
  ExactDedupParams p;
  p.min_match_tokens = 8;
  p.shard_count = 1;
  WhitespaceCounter counter;
  const auto r = exact_substring_dedup(docs, p, counter);
  REQUIRE(r.docs.size() == 2);
  CHECK(r.docs[0].text == docs[0].text);
  CHECK(r.docs[1].text == "four");
  CHECK(r.dropped_ids == std::vector<std::string>{"c"});
  CHECK(r.report.tokens_in == 11 + 9 + 8);
  CHECK(r.report.tokens_out == 11 + 1);
  CHECK(r.report.rules.at("exact_substring").tokens_removed == 16);
  CHECK(r.report.rules.at("exact_substring").docs_dropped == 1);
  CHECK(r.report.reconciles());
}

TEST_CASE("documents in different shards are deduplicated independently") {
  const std::string shared = "alpha beta gamma delta epsilon zeta eta theta";
  std::vector<Document> docs;
  for (int i = 0; i < 40; ++i) docs.push_back(doc("d" + std::to_string(i), "x" + std::to_string(i) + " " + shared));
  ExactDedupParams p;
  p.min_match_tokens = 8;
  p.shard_count = 4;
  WhitespaceCounter counter;
  const auto r = exact_substring_dedup(docs, p, counter);
  std::set<std::size_t> shards;
  for (const auto& d : docs) shards.insert(shard_of(d, 4));
  CHECK(r.report.rules.at("exact_substring").tokens_removed == 8 * (docs.size() - shards.size()));
}

TEST_CASE("removing marked tokens keeps the rest of the text verbatim") {
  CHECK(remove_marked_tokens("a b c d", {false, true, true, false}) == "a d");
  CHECK(remove_marked_tokens("a\nb c\nd", {false, true, true, false}) == "a\nd");
  CHECK(remove_marked_tokens("a b c", {false, false, true}) == "a b");
  CHECK(remove_marked_tokens("  a b", {true, false}) == "  b");
  CHECK(remove_marked_tokens("a b", {true, true}).empty());
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    std::vector<bool> mask;
    std::vector<std::string> kept;
    const std::size_t n = rng() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      text += std::string(1 + rng() % 2, ' ') + (rng() % 4 == 0 ? "\n" : "") + "w" + std::to_string(i);
      mask.push_back(rng() % 2);
      if (!mask.back()) kept.push_back("w" + std::to_string(i));
    }
    text += std::string(rng() % 2, '\n');
    const auto out = remove_marked_tokens(text, mask);
    std::vector<std::string> got;
    for (auto w : split_whitespace(out)) got.emplace_back(w);
    CHECK(got == kept);
    // Subsequence of the input.
    std::size_t j = 0;
    for (char c : text) {
      if (j < out.size() && out[j] == c) ++j;
    }
    CHECK(j == out.size());
  }
}

TEST_CASE("MinHash estimates track the exact Jaccard similarity") {
  std::mt19937_64 rng(4);
  for (double target : {0.2, 0.5, 0.8}) {
    double err = 0;
    const int pairs = 200;
    for (int i = 0; i < pairs; ++i) {
      std::vector<std::uint64_t> pool(200);
      for (auto& x : pool) x = rng();
      const auto shared = static_cast<std::size_t>(std::lround(200 * 2 * target / (1 + target)));
      const std::size_t each = (200 + shared) / 2;
      std::vector<std::uint64_t> a(pool.begin(), pool.begin() + static_cast<long>(each));
      std::vector<std::uint64_t> b(pool.end() - static_cast<long>(each), pool.end());
      const double exact = test::brute_jaccard({a.begin(), a.end()}, {b.begin(), b.end()});
      const double est = estimate_jaccard(minhash_from_shingles(a, 128, 7), minhash_from_shingles(b, 128, 7));
      err += std::abs(est - exact);
    }
    CHECK(err / pairs <= 0.06);
  }
}

TEST_CASE("MinHash edge cases") {
  const std::string text = "one two three four five six seven eight nine ten eleven twelve thirteen fourteen";
  CHECK(estimate_jaccard(minhash(text), minhash(text)) == 1.0);
  CHECK(shingle_hashes(text, 13).size() == 2);
  CHECK_THROWS_AS(shingle_hashes("too short", 13), Error);
  CHECK_THROWS_AS(estimate_jaccard(minhash(text, 13, 64), minhash(text, 13, 128)), Error);
  CHECK_THROWS_AS(estimate_jaccard(minhash(text, 13, 128, 1), minhash(text, 13, 128, 2)), Error);
  CHECK(minhash(text) == minhash(text));
}

TEST_CASE("LSH proposes pairs sharing a band") {
  LshIndex index(4, 2);
  MinHashSignature a{{1, 2, 3, 4, 5, 6, 7, 8}, 0};
  MinHashSignature b{{9, 9, 3, 4, 9, 9, 9, 9}, 0};
  MinHashSignature c{{0, 0, 0, 0, 0, 0, 0, 0}, 0};
  index.insert(0, a);
  index.insert(1, b);
  index.insert(2, c);
  const auto pairs = index.candidate_pairs();
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
}

TEST_CASE("fuzzy dedup clusters near duplicates transitively") {
  std::mt19937_64 rng(5);
  const std::string base = test::english_text(rng, 10);
  auto variant = [&](const std::string& s, const std::string& tail) { return s + " " + tail; };
  std::vector<Document> docs = {doc("b", variant(base, "end.")), doc("a", base), doc("c", variant(base, "finish.")),
                                doc("z", test::english_text(rng, 10)), doc("short", "too short")};
  WhitespaceCounter counter;
  const auto r = fuzzy_dedup(docs, {}, counter);
  REQUIRE(r.clusters.size() == 1);
  CHECK(r.clusters[0].representative == "a");
  CHECK(r.clusters[0].members == std::vector<std::string>{"a", "b", "c"});
  CHECK(r.removed_ids == std::vector<std::string>{"b", "c"});
  CHECK(r.kept.size() == 3);
  CHECK(r.kept[0].id == "a");
  CHECK(r.report.details["below_shingle_width"] == 1);
  CHECK(r.report.reconciles());

  FuzzyDedupParams four;
  four.workers = 4;
  const auto r4 = fuzzy_dedup(docs, four, counter);
  CHECK(r4.clusters == r.clusters);
  CHECK(r4.kept == r.kept);
}

TEST_CASE("fuzzy dedup parameters are validated") {
  FuzzyDedupParams p;
  p.bands = 10;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.threshold = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
}
