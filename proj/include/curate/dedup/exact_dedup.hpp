#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/stage_report.hpp"
#include "curate/core/token_counter.hpp"

namespace curate {

/// Stable hash of snapshot + id modulo shard_count (shard_count >= 1).
std::size_t shard_of(const Document& doc, std::size_t shard_count);
std::vector<std::size_t> shard_by_snapshot(std::span<const Document> docs, std::size_t shard_count);

/// Suffix array by prefix doubling; O(n log^2 n).
std::vector<std::uint32_t> suffix_array(std::span<const std::uint32_t> s);
/// Kasai LCP: lcp[i] = common prefix of suffixes sa[i-1] and sa[i]; lcp[0] = 0.
std::vector<std::uint32_t> lcp_array(std::span<const std::uint32_t> s, std::span<const std::uint32_t> sa);

/// For each document, marks tokens covered by a `min_match`-token window
/// that already occurred earlier in the concatenation (document order, then
/// position). Documents are separated by unique sentinels, so windows never
/// span two documents.
std::vector<std::vector<bool>> duplicate_token_mask(const std::vector<std::vector<std::uint32_t>>& docs,
                                                    std::size_t min_match);

/// Removes marked whitespace tokens from `text`, dropping the whitespace
/// that followed each removed run (or preceded it, at the end of the text).
/// The result is always a subsequence of the input.
std::string remove_marked_tokens(std::string_view text, const std::vector<bool>& mask);

/// Interns whitespace tokens of each text into ids.
std::vector<std::vector<std::uint32_t>> tokenize_for_dedup(const std::vector<std::string_view>& texts);

struct ExactDedupParams {
  std::size_t min_match_tokens = 50;
  std::size_t shard_count = 8;
  std::size_t workers = 1;

  void validate() const;
};

struct ExactDedupResult {
  std::vector<Document> docs;             // rewritten, input order, empties dropped
  std::vector<std::string> dropped_ids;   // became empty
  StageReport report;
};

ExactDedupResult exact_substring_dedup(std::vector<Document> docs, const ExactDedupParams& params,
                                       const TokenCounter& counter);

}  // namespace curate
