#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/token_counter.hpp"

namespace curate {

struct LabelRow {
  QualityLabel label = QualityLabel::High;
  std::uint64_t docs = 0;
  std::uint64_t tokens = 0;
  double percent = 0;  // of all labelled real tokens
};

struct SyntheticRow {
  QualityLabel label = QualityLabel::High;
  PromptKind kind = PromptKind::Wikipedia;
  std::uint64_t docs = 0;
  std::uint64_t tokens = 0;
};

struct DedupAccounting {
  std::uint64_t total_docs = 0;
  std::uint64_t total_tokens = 0;
  std::uint64_t unique_docs = 0;
  std::uint64_t unique_tokens = 0;
};

struct DatasetStats {
  std::vector<LabelRow> labels;  // all five labels, High first
  std::uint64_t real_docs = 0;
  std::uint64_t real_tokens = 0;
  std::uint64_t unlabeled_docs = 0;
  std::vector<SyntheticRow> synthetic;  // non-empty (label, kind) cells
  std::optional<DedupAccounting> dedup;

  Json to_json() const;
  std::string to_text() const;
};

DatasetStats compute_stats(std::span<const Document> docs, const TokenCounter& counter);

/// Reads <dir>/<label>/<kind>/*.jsonl.gz and, when present,
/// <dir>/reports/reports.json for the before/after-dedup totals.
DatasetStats dataset_stats(const std::filesystem::path& dir, const TokenCounter& counter);

}  // namespace curate
