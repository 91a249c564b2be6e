#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/token_counter.hpp"
#include "curate/sdg/chat_client.hpp"
#include "curate/sdg/chunker.hpp"
#include "curate/sdg/postprocess.hpp"

namespace curate {

struct SdgOptions {
  bool medium_high_as_high = true;
  std::vector<PromptKind> kinds{kAllPromptKinds.begin(), kAllPromptKinds.end()};  // enabled kinds
  std::size_t min_tokens = kMinSyntheticTokens;
  QaAssemblyOptions qa;
  std::string model = "generator";
  double temperature = 0.5;
  double top_p = 0.9;
  std::size_t max_tokens = 1024;
  std::uint64_t seed = 0;

  static SdgOptions from_json(const Json& j);
};

// One prompt to send: a segment of a parent document for one kind.
struct SegmentJob {
  std::string parent_id;
  std::string parent_url;
  std::string parent_snapshot;
  std::optional<QualityLabel> parent_label;
  PromptKind kind = PromptKind::Wikipedia;
  Segment segment;

  std::string request_id() const;  // "<parent>|<kind>|<index>"
  Json to_json() const;
  static SegmentJob from_json(const Json& j);
};

struct RawGeneration {
  SegmentJob job;
  std::string content;
  bool truncated = false;
  std::string error;  // non-empty when generation failed
  std::string model;
  double temperature = 0.5;
  double top_p = 0.9;

  Json to_json() const;
  static RawGeneration from_json(const Json& j);
};

struct SyntheticRecord {
  std::string parent_id;
  std::string parent_url;
  std::string parent_snapshot;
  std::optional<QualityLabel> parent_label;
  PromptKind kind = PromptKind::Wikipedia;
  std::optional<std::size_t> segment_index;  // absent for assembled Wikipedia passages
  std::string text;
  std::string model;
  double temperature = 0.5;
  double top_p = 0.9;

  std::string id() const;
  Document to_document() const;
};

struct KindStats {
  std::size_t source_docs = 0;
  std::size_t segments = 0;
  std::size_t discarded_lines = 0;
  std::size_t failed_requests = 0;
  std::map<std::string, std::size_t> rejected;  // postprocess reason -> count
  std::size_t without_record = 0;               // no accepted output / no QA pairs
  std::size_t qa_fragments_dropped = 0;
  std::size_t records = 0;
  std::uint64_t tokens = 0;

  Json to_json() const;
};

struct SdgReport {
  std::map<PromptKind, KindStats> kinds;
  std::vector<std::string> errors;  // "<request id>: <message>"
  Json to_json() const;
};

/// Plans kinds per document and chunks each one. Documents in `docs` must
/// carry labels.
std::vector<SegmentJob> plan_segments(std::span<const Document> docs, const SdgOptions& options,
                                      const TokenCounter& counter, SdgReport& report);

std::vector<RawGeneration> run_generation(const std::vector<SegmentJob>& jobs, const Generator& generator,
                                          const SdgOptions& options, SdgReport& report);

/// Post-processes, parses and assembles generations. Records are ordered by
/// parent (first appearance), kind, then segment.
std::vector<SyntheticRecord> assemble_records(const std::vector<RawGeneration>& raw, const SdgOptions& options,
                                              const TokenCounter& counter, SdgReport& report);

struct SdgResult {
  std::vector<SyntheticRecord> records;
  SdgReport report;
};

SdgResult generate_synthetic(std::span<const Document> docs, const Generator& generator, const SdgOptions& options,
                             const TokenCounter& counter);

}  // namespace curate
