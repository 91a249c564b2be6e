#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/record_io.hpp"
#include "curate/dedup/exact_dedup.hpp"
#include "curate/dedup/fuzzy_dedup.hpp"
#include "curate/extraction/extractor.hpp"
#include "curate/heuristics/rules.hpp"
#include "curate/quality/scorer.hpp"
#include "curate/sdg/chat_client.hpp"
#include "curate/sdg/generation.hpp"

namespace curate {

struct InputConfig {
  std::vector<std::filesystem::path> paths;
  std::optional<RecordFormat> format;  // by extension when absent
  std::string default_snapshot;
};

struct StageToggles {
  bool extract = true;
  bool langid = true;
  bool dedup_fuzzy = true;
  bool dedup_exact = true;
  bool heuristics = true;
  bool perplexity = true;
  bool sdg = true;
};

struct LangIdConfig {
  bool external = false;  // use lang/lang_conf already on the records
  double threshold = 0.3;
};

struct QualityConfig {
  std::vector<ScorerSpec> scorers;
  std::optional<std::filesystem::path> boundaries;  // frozen thresholds; fit when absent
};

struct PerplexityConfig {
  std::optional<std::filesystem::path> model;         // NGLM1 file
  std::optional<std::filesystem::path> train_corpus;  // JSONL documents or plain text lines
  std::size_t order = 5;
  std::optional<double> threshold;
  double quantile = 0.9;
  std::size_t holdout_every = 10;
};

struct PipelineConfig {
  std::filesystem::path config_path;
  InputConfig input;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t shard_count = 8;
  std::string tokenizer = "whitespace";
  StageToggles stages;
  ExtractionParams extraction;
  std::optional<std::filesystem::path> stopwords;
  LangIdConfig langid;
  FuzzyDedupParams fuzzy;
  ExactDedupParams exact;
  QualityConfig quality;
  Json rules = nullptr;  // null: every rule with defaults
  PerplexityConfig perplexity;
  SdgOptions sdg;
  ChatClientOptions endpoint;

  /// Relative paths resolve against `base_dir`. Unknown keys are errors.
  static PipelineConfig from_json(const Json& j, const std::filesystem::path& base_dir);
  void validate() const;
  Ruleset ruleset() const;
};

/// Parses JSON that may contain // and /* */ comments.
Json parse_config_text(std::string_view text);
/// Throws ConfigError when the file is missing or invalid.
PipelineConfig load_config(const std::filesystem::path& path);

/// A fully commented configuration listing every key with its default.
std::string_view default_config_text();

}  // namespace curate
