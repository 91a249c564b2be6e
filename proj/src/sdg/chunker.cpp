#include "curate/sdg/chunker.hpp"

#include "curate/sdg/prompts.hpp"

namespace curate {

std::vector<std::string_view> content_lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!split_whitespace(line).empty()) out.push_back(line);
    start = nl + 1;
  }
  return out;
}

ChunkResult chunk_text(std::string_view parent_id, std::string_view text, std::size_t limit, std::size_t overhead,
                       const TokenCounter& counter) {
  ChunkResult result;
  const auto lines = content_lines_of(text);
  result.line_count = lines.size();
  const std::size_t budget = limit > overhead ? limit - overhead : 0;

  Segment open;
  auto flush = [&] {
    if (open.lines.empty()) return;
    open.parent_id = std::string(parent_id);
    open.index = result.segments.size();
    open.token_count = counter.count(open.text);
    result.segments.push_back(std::move(open));
    open = Segment{};
  };
  std::size_t open_tokens = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t t = counter.count(lines[i]);
    if (t > budget) {
      flush();
      open_tokens = 0;
      result.discarded_lines.push_back(i);
      continue;
    }
    if (!open.lines.empty() && open_tokens + t > budget) {
      flush();
      open_tokens = 0;
    }
    if (!open.lines.empty()) open.text.push_back('\n');
    open.text.append(lines[i]);
    open.lines.push_back(i);
    open_tokens += t;
  }
  flush();
  return result;
}

ChunkResult chunk_document(const Document& doc, PromptKind kind, const TokenCounter& counter) {
  return chunk_text(doc.id, doc.text, token_limit(kind), prompt_overhead(kind, counter), counter);
}

}  // namespace curate
