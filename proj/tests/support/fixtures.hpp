#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "curate/core/document.hpp"

namespace curate::test {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "curate-test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Plain English prose: `lines` lines of `sentences_per_line` sentences, each
// sentence 8-14 common words ending in a period.
std::string english_text(std::mt19937_64& rng, std::size_t lines, std::size_t sentences_per_line = 2);
// French prose of the same shape.
std::string french_text(std::mt19937_64& rng, std::size_t lines);
// Sentences of invented words held together by a few stop words.
std::string gibberish_text(std::mt19937_64& rng, std::size_t lines);

// A score that lands in `bucket` under the thresholds 0.05, 0.10, ..., 0.95.
double score_for_bucket(int bucket);
// Thresholds 0.05 * (i + 1) for both smoke scorers.
Json uniform_boundaries_json(const std::vector<std::string>& scorers);

// What the smoke corpus expects to happen to each planted document.
struct PlannedFate {
  bool kept = false;
  std::optional<QualityLabel> label;  // when kept
  std::string drop_rule;              // when dropped ("language", "fuzzy_duplicate", ...)
};

struct SmokeCorpus {
  std::vector<Document> docs;
  std::map<std::string, PlannedFate> fate;  // by id; duplicates map to their own id
  std::vector<std::string> lm_training_texts;
  double perplexity_threshold = 0;
  std::string lorem_high_id;
  std::string lorem_low_id;

  std::map<QualityLabel, std::size_t> expected_real_counts() const;
  std::map<std::string, std::size_t> expected_drop_counts() const;  // by rule
};

// 200 documents: High 20, Medium-High 20, Medium 60, Medium-Low 40, Low 40,
// 10 French documents and 10 verbatim copies of Medium documents. Two
// external scores ("edu", "dclm") per document; "edu" carries the planned
// bucket and "dclm" a lower one. Planted drops: 5 short Medium documents,
// a lorem-ipsum Low document (bucket 5), 5 gibberish Low documents. The
// lorem-ipsum High document (bucket 19) and a trailing junk line on every
// High and Medium-Low document exercise the high-quality bypass.
SmokeCorpus make_smoke_corpus(std::uint64_t seed = 2024);

// Writes corpus.jsonl, lm_train.txt, boundaries.json and config.json into
// `dir` and returns the config path. `endpoint` is the chat base URL.
std::filesystem::path write_smoke_workspace(const std::filesystem::path& dir, const SmokeCorpus& corpus,
                                            const std::string& endpoint, std::size_t workers = 2);

}  // namespace curate::test
