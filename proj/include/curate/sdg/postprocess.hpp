#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/token_counter.hpp"

namespace curate {

inline constexpr std::size_t kMinSyntheticTokens = 50;

inline constexpr std::string_view kRejectIncomplete = "incomplete";
inline constexpr std::string_view kRejectUnderLength = "under_length";

struct PostprocessResult {
  bool accepted = false;
  std::string text;    // cleaned text when accepted
  std::string reason;  // rejection reason otherwise
};

/// Known leading phrases removed from generations (matched case-insensitively).
const std::vector<std::string>& default_strip_prefixes();

/// True when the trimmed text ends in sentence-final punctuation.
bool ends_with_terminal_punctuation(std::string_view text);

/// 1. reject when `truncated` and the text lacks terminal punctuation;
/// 2. delete every "**"; 3/4. strip known prefixes and one enclosing pair of
/// quotes, repeated until neither applies; 5. reject under `min_tokens`.
PostprocessResult postprocess(PromptKind kind, std::string_view raw, bool truncated, const TokenCounter& counter,
                              std::size_t min_tokens = kMinSyntheticTokens);

struct QaPair {
  std::string question;
  std::string answer;
  friend bool operator==(const QaPair&, const QaPair&) = default;
};

struct QaParseResult {
  std::vector<QaPair> pairs;
  std::size_t dropped_fragments = 0;
};

inline constexpr std::string_view kQaHeader = "Here are the questions and answers based on the provided text:";

/// Extracts "Question: ... Answer: ..." pairs. Bullets ("- ") and the
/// response header line are removed first; an answer runs to the next
/// "Question:" or the end of the text.
QaParseResult parse_qa(std::string_view text);

struct QaAssemblyOptions {
  std::size_t tokens_per_pair = 150;
  std::size_t max_pairs = 8;
};

/// clamp(ceil(segment_tokens / tokens_per_pair), 1, max_pairs).
std::size_t max_retained_pairs(std::size_t segment_tokens, const QaAssemblyOptions& options = {});

/// Seeded shuffle of `pairs`, keeps max_retained_pairs, and appends them to
/// the segment after a blank line as "Question: q\nAnswer: a" lines.
/// Returns an empty string when `pairs` is empty.
std::string assemble_qa(std::string_view segment, std::vector<QaPair> pairs, std::uint64_t seed,
                        const TokenCounter& counter, const QaAssemblyOptions& options = {});

/// Accepted passages in segment order joined by blank lines; empty when
/// there are none.
std::string assemble_wikipedia(const std::vector<std::string>& passages);

/// Low -> {Wikipedia}; High -> all kinds; MediumHigh -> all kinds when
/// `medium_high_as_high`, else none; Medium and MediumLow -> none.
/// Throws when the document has no label.
std::vector<PromptKind> plan_generation(const Document& doc, bool medium_high_as_high = true);

}  // namespace curate
