#include "curate/sdg/postprocess.hpp"

#include <algorithm>
#include <random>

#include "curate/core/error.hpp"

namespace curate {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    auto a = s[i], b = prefix[i];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
    if (b >= 'A' && b <= 'Z') b = static_cast<char>(b - 'A' + 'a');
    if (a != b) return false;
  }
  return true;
}

bool strip_enclosing_quotes(std::string& s) {
  static constexpr std::pair<std::string_view, std::string_view> quotes[] = {
      {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"}};
  for (const auto& [open, close] : quotes) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
      s = std::string(trim(std::string_view(s).substr(open.size(), s.size() - open.size() - close.size())));
      return true;
    }
  }
  return false;
}

void remove_all(std::string& s, std::string_view needle) {
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle)) s.erase(pos, needle.size());
}

}  // namespace

const std::vector<std::string>& default_strip_prefixes() {
  static const std::vector<std::string> prefixes = {"Here is a paraphrased version:", "Paraphrased Text:"};
  return prefixes;
}

bool ends_with_terminal_punctuation(std::string_view text) {
  const auto t = trim(text);
  for (std::string_view end : {".", "!", "?", "\"", "'", ")", "]", "”", "’", "…"}) {
    if (t.ends_with(end)) return true;
  }
  return false;
}

PostprocessResult postprocess(PromptKind, std::string_view raw, bool truncated, const TokenCounter& counter,
                              std::size_t min_tokens) {
  PostprocessResult r;
  if (truncated && !ends_with_terminal_punctuation(raw)) {
    r.reason = std::string(kRejectIncomplete);
    return r;
  }
  std::string text(raw);
  remove_all(text, "**");
  text = std::string(trim(text));
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : default_strip_prefixes()) {
      if (iequals_prefix(text, p)) {
        text = std::string(trim(std::string_view(text).substr(p.size())));
        changed = true;
      }
    }
    if (strip_enclosing_quotes(text)) changed = true;
  }
  if (counter.count(text) < min_tokens) {
    r.reason = std::string(kRejectUnderLength);
    return r;
  }
  r.accepted = true;
  r.text = std::move(text);
  return r;
}

QaParseResult parse_qa(std::string_view text) {
  // Normalise: drop the header line and leading bullets.
  std::string norm;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = trim(text.substr(start, nl - start));
    start = nl + 1;
    if (iequals_prefix(line, kQaHeader) && trim(line.substr(kQaHeader.size())).empty()) continue;
    while (line.starts_with("- ") || line.starts_with("* ") || line.starts_with("• "))
      line = trim(line.substr(line.starts_with("• ") ? 4 : 2));
    norm.append(line);
    norm.push_back('\n');
  }

  constexpr std::string_view q_tag = "Question:";
  constexpr std::string_view a_tag = "Answer:";
  QaParseResult result;
  std::string_view s = norm;
  auto q = s.find(q_tag);
  if (!trim(s.substr(0, q == std::string_view::npos ? s.size() : q)).empty()) ++result.dropped_fragments;
  while (q != std::string_view::npos) {
    const auto next = s.find(q_tag, q + q_tag.size());
    const auto block = s.substr(q + q_tag.size(), next == std::string_view::npos ? std::string_view::npos
                                                                                 : next - q - q_tag.size());
    const auto a = block.find(a_tag);
    if (a == std::string_view::npos) {
      ++result.dropped_fragments;
    } else {
      QaPair p{std::string(trim(block.substr(0, a))), std::string(trim(block.substr(a + a_tag.size())))};
      if (p.question.empty() || p.answer.empty()) {
        ++result.dropped_fragments;
      } else {
        result.pairs.push_back(std::move(p));
      }
    }
    q = next;
  }
  return result;
}

std::size_t max_retained_pairs(std::size_t segment_tokens, const QaAssemblyOptions& options) {
  if (options.tokens_per_pair == 0 || options.max_pairs == 0) throw Error("QA assembly options must be positive");
  const std::size_t n = (segment_tokens + options.tokens_per_pair - 1) / options.tokens_per_pair;
  return std::clamp<std::size_t>(n, 1, options.max_pairs);
}

std::string assemble_qa(std::string_view segment, std::vector<QaPair> pairs, std::uint64_t seed,
                        const TokenCounter& counter, const QaAssemblyOptions& options) {
  if (pairs.empty()) return {};
  std::mt19937_64 rng(seed);
  for (std::size_t i = pairs.size(); i > 1; --i) std::swap(pairs[i - 1], pairs[rng() % i]);
  pairs.resize(std::min(pairs.size(), max_retained_pairs(counter.count(segment), options)));
  std::string out(segment);
  out.append("\n\n");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) out.push_back('\n');
    out.append("Question: ").append(pairs[i].question).append("\nAnswer: ").append(pairs[i].answer);
  }
  return out;
}

std::string assemble_wikipedia(const std::vector<std::string>& passages) {
  std::string out;
  for (const auto& p : passages) {
    if (!out.empty()) out.append("\n\n");
    out.append(p);
  }
  return out;
}

std::vector<PromptKind> plan_generation(const Document& doc, bool medium_high_as_high) {
  if (!doc.label) throw Error("document " + doc.id + " has no quality label");
  switch (*doc.label) {
    case QualityLabel::High: return {kAllPromptKinds.begin(), kAllPromptKinds.end()};
    case QualityLabel::MediumHigh:
      if (medium_high_as_high) return {kAllPromptKinds.begin(), kAllPromptKinds.end()};
      return {};
    case QualityLabel::Low: return {PromptKind::Wikipedia};
    case QualityLabel::Medium:
    case QualityLabel::MediumLow: return {};
  }
  return {};
}

}  // namespace curate
