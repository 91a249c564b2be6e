#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/token_counter.hpp"

namespace curate {

struct Segment {
  std::string parent_id;
  std::size_t index = 0;
  std::string text;              // complete source lines joined by '\n'
  std::size_t token_count = 0;
  std::vector<std::size_t> lines;  // indices into the document's content lines

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct ChunkResult {
  std::vector<Segment> segments;
  std::vector<std::size_t> discarded_lines;  // content-line indices, ascending
  std::size_t line_count = 0;                // content lines in the document
};

/// Non-blank lines of `text`, trailing '\r' removed, in order.
std::vector<std::string_view> content_lines_of(std::string_view text);

/// Greedy packing of whole lines: a line joins the open segment while
/// segment tokens + line tokens + overhead <= limit, otherwise the segment is
/// flushed. A line that alone exceeds limit - overhead is discarded (and
/// closes the open segment so segments stay contiguous).
ChunkResult chunk_text(std::string_view parent_id, std::string_view text, std::size_t limit, std::size_t overhead,
                       const TokenCounter& counter);
ChunkResult chunk_document(const Document& doc, PromptKind kind, const TokenCounter& counter);

}  // namespace curate
