#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/stage_report.hpp"
#include "curate/heuristics/rules.hpp"
#include "curate/pipeline/config.hpp"
#include "curate/sdg/chat_client.hpp"

namespace curate {

struct PipelineResult {
  Json reports;  // the content of reports/reports.json
  std::vector<StageReport> stages;
  std::vector<DroppedDocument> dropped;
  std::map<std::string, std::size_t> partitions;  // relative path -> records
  std::size_t real_docs = 0;
  std::size_t synthetic_docs = 0;
};

/// Runs every enabled stage and writes
///   <out>/<label>/<real|prompt kind>/part-<shard>.jsonl.gz
///   <out>/reports/{reports.json, reports.txt, drops.jsonl, clusters.jsonl, boundaries.json}
/// Existing label and report directories under <out> are replaced. When
/// `generator` is null and SDG is enabled, the configured endpoint is used.
/// Stage failures are rethrown as StageError.
PipelineResult run_pipeline(const PipelineConfig& config, const Generator* generator = nullptr);

/// Relative partition path for a document: <label>/<kind>/part-NNNNN.jsonl.gz.
std::filesystem::path partition_path(const Document& doc, std::size_t shard_count);

}  // namespace curate
