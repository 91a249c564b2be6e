#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/token_counter.hpp"

namespace curate {

inline constexpr std::string_view kSegmentPlaceholder = "[DOCUMENT SEGMENT]";
/// Allowance for chat-format tokens counted against every prompt limit.
inline constexpr std::size_t kChatFormatTokens = 16;

struct ChatMessage {
  std::string role;
  std::string content;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Template text containing the placeholder exactly once.
std::string_view prompt_template(PromptKind kind);
/// Total token budget (prompt + chat format + segment) per kind.
std::size_t token_limit(PromptKind kind);

std::string render_prompt_text(PromptKind kind, std::string_view segment);
/// A single user message; throws on an empty segment.
std::vector<ChatMessage> render_prompt(PromptKind kind, std::string_view segment);
/// Tokens of the template rendered with an empty segment plus kChatFormatTokens.
std::size_t prompt_overhead(PromptKind kind, const TokenCounter& counter);

/// Inverse of rendering, used by the stub endpoint.
std::optional<PromptKind> detect_prompt_kind(std::string_view prompt);
std::optional<std::string> extract_segment(std::string_view prompt);

}  // namespace curate
