#include "curate/heuristics/rules.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "curate/core/error.hpp"
#include "curate/core/parallel.hpp"
#include "curate/extraction/utf8.hpp"

namespace curate {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool ends_with_any(std::string_view s, std::initializer_list<std::string_view> suffixes) {
  for (auto suf : suffixes) {
    if (s.ends_with(suf)) return true;
  }
  return false;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  for (;;) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      return lines;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
}

std::vector<std::string_view> content_lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split_lines(text)) {
    if (!trim(line).empty()) out.push_back(trim(line));
  }
  return out;
}

template <typename Pred>
double line_fraction(std::string_view text, Pred pred) {
  const auto lines = content_lines(text);
  if (lines.empty()) return 0.0;
  std::size_t hits = 0;
  for (auto l : lines) hits += pred(l) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(lines.size());
}

bool is_bullet_line(std::string_view line) {
  static constexpr std::array<std::string_view, 8> bullets = {"•", "●", "◦", "‣", "▪", "–", "-", "*"};
  for (auto b : bullets) {
    if (line.starts_with(b)) return true;
  }
  return false;
}

bool is_ellipsis_line(std::string_view line) { return ends_with_any(line, {"...", "…"}); }

std::string_view strip_edge_punct(std::string_view w) {
  auto punct = [](char c) { return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~'); };
  while (!w.empty() && punct(w.front())) w.remove_prefix(1);
  while (!w.empty() && punct(w.back())) w.remove_suffix(1);
  return w;
}

struct RuleTemplate {
  RuleScope scope;
  std::map<std::string, double> defaults;
  std::function<bool(std::string_view)> (*build)(const std::map<std::string, double>&);
};

const std::map<std::string, RuleTemplate>& templates() {
  static const std::map<std::string, RuleTemplate> table = {
      {"c4_terminal_punct",
       {RuleScope::Line, {}, [](const std::map<std::string, double>&) -> std::function<bool(std::string_view)> {
          return [](std::string_view line) {
            return ends_with_any(trim(line), {".", "!", "?", "\"", "'", "”", "’"});
          };
        }}},
      {"c4_min_words_per_line",
       {RuleScope::Line, {{"min_words", 5}}, [](const std::map<std::string, double>& p) -> std::function<bool(std::string_view)> {
          const double min_words = p.at("min_words");
          return [min_words](std::string_view line) {
            return static_cast<double>(split_whitespace(line).size()) >= min_words;
          };
        }}},
      {"c4_javascript",
       {RuleScope::Line, {}, [](const std::map<std::string, double>&) -> std::function<bool(std::string_view)> {
          return [](std::string_view line) { return ascii_lower(line).find("javascript") == std::string::npos; };
        }}},
      {"c4_lorem_ipsum",
       {RuleScope::Document, {}, [](const std::map<std::string, double>&) -> std::function<bool(std::string_view)> {
          return [](std::string_view text) { return ascii_lower(text).find("lorem ipsum") == std::string::npos; };
        }}},
      {"c4_curly_bracket",
       {RuleScope::Document, {}, [](const std::map<std::string, double>&) -> std::function<bool(std::string_view)> {
          return [](std::string_view text) { return text.find('{') == std::string_view::npos; };
        }}},
      {"c4_min_sentences",
       {RuleScope::Document, {{"min_sentences", 3}}, [](const std::map<std::string, double>& p) -> std::function<bool(std::string_view)> {
          const double min_sentences = p.at("min_sentences");
          return [min_sentences](std::string_view text) {
            return static_cast<double>(count_sentences(text)) >= min_sentences;
          };
        }}},
      {"gopher_word_count",
       {RuleScope::Document, {{"min_words", 50}, {"max_words", 100000}},
        [](const std::map<std::string, double>& p) -> std::function<bool(std::string_view)> {
          const double lo = p.at("min_words"), hi = p.at("max_words");
          return [lo, hi](std::string_view text) {
            const auto n = static_cast<double>(split_whitespace(text).size());
            return n >= lo && n <= hi;
          };
        }}},
      {"gopher_mean_word_length",
       {RuleScope::Document, {{"min_length", 3}, {"max_length", 10}},
        [](const std::map<std::string, double>& p) -> std::function<bool(std::string_view)> {
          const double lo = p.at("min_length"), hi = p.at("max_length");
          return [lo, hi](std::string_view text) {
            const double m = mean_word_length(text);
            return m >= lo && m <= hi;
          };
        }}},
      {"gopher_symbol_ratio",
       {RuleScope::Document, {{"max_ratio", 0.1}}, [](const std::map<std::string, double>& p) -> std::function<bool(std::string_view)> {
          const double hi = p.at("max_ratio");
          return [hi](std::string_view text) { return symbol_to_word_ratio(text) <= hi; };
        }}},
      {"gopher_alpha_words",
       {RuleScope::Document, {{"min_fraction", 0.8}}, [](const std::map<std::string, double>& p) -> std::function<bool(std::string_view)> {
          const double lo = p.at("min_fraction");
          return [lo](std::string_view text) { return alpha_word_fraction(text) >= lo; };
        }}},
      {"gopher_bullet_lines",
       {RuleScope::Document, {{"max_fraction", 0.9}}, [](const std::map<std::string, double>& p) -> std::function<bool(std::string_view)> {
          const double hi = p.at("max_fraction");
          return [hi](std::string_view text) { return line_fraction(text, is_bullet_line) <= hi; };
        }}},
      {"gopher_ellipsis_lines",
       {RuleScope::Document, {{"max_fraction", 0.3}}, [](const std::map<std::string, double>& p) -> std::function<bool(std::string_view)> {
          const double hi = p.at("max_fraction");
          return [hi](std::string_view text) { return line_fraction(text, is_ellipsis_line) <= hi; };
        }}},
      {"gopher_stop_words",
       {RuleScope::Document, {{"min_count", 2}}, [](const std::map<std::string, double>& p) -> std::function<bool(std::string_view)> {
          const double lo = p.at("min_count");
          return [lo](std::string_view text) { return static_cast<double>(distinct_stop_words(text)) >= lo; };
        }}},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& known_rule_names() {
  static const std::vector<std::string> names = {
      "c4_terminal_punct",   "c4_min_words_per_line",   "c4_javascript",       "c4_lorem_ipsum",
      "c4_curly_bracket",    "c4_min_sentences",        "gopher_word_count",   "gopher_mean_word_length",
      "gopher_symbol_ratio", "gopher_alpha_words",      "gopher_bullet_lines", "gopher_ellipsis_lines",
      "gopher_stop_words"};
  return names;
}

FilterRule make_rule(const std::string& name, const std::map<std::string, double>& overrides) {
  const auto it = templates().find(name);
  if (it == templates().end()) throw ConfigError("unknown heuristic rule: " + name);
  FilterRule rule;
  rule.name = name;
  rule.scope = it->second.scope;
  rule.params = it->second.defaults;
  for (const auto& [k, v] : overrides) {
    if (!rule.params.count(k)) throw ConfigError("rule " + name + " has no parameter " + k);
    rule.params[k] = v;
  }
  rule.keep = it->second.build(rule.params);
  return rule;
}

Ruleset default_ruleset() {
  Ruleset rules;
  for (const auto& n : known_rule_names()) rules.push_back(make_rule(n));
  return rules;
}

Ruleset ruleset_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("ruleset must be an array");
  Ruleset rules;
  for (const auto& entry : j) {
    if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string())
      throw ConfigError("ruleset entries need a string \"name\"");
    if (entry.contains("enabled") && !entry["enabled"].get<bool>()) continue;
    std::map<std::string, double> params;
    if (entry.contains("params")) {
      if (!entry["params"].is_object()) throw ConfigError("rule params must be an object");
      for (const auto& [k, v] : entry["params"].items()) {
        if (!v.is_number()) throw ConfigError("rule parameter " + k + " must be numeric");
        params[k] = v.get<double>();
      }
    }
    rules.push_back(make_rule(entry["name"].get<std::string>(), params));
  }
  return rules;
}

std::size_t count_sentences(std::string_view text) {
  std::size_t n = 0;
  for (auto w : split_whitespace(text)) {
    while (!w.empty() && (w.back() == '"' || w.back() == '\'' || w.back() == ')' || w.back() == ']'))
      w.remove_suffix(1);
    if (ends_with_any(w, {"”", "’"})) w.remove_suffix(3);
    if (w.size() > 1 && ends_with_any(w, {".", "!", "?", "…"})) ++n;
  }
  return n;
}

double mean_word_length(std::string_view text) {
  const auto words = split_whitespace(text);
  if (words.empty()) return 0.0;
  std::size_t total = 0;
  for (auto w : words) total += utf8::length(w);
  return static_cast<double>(total) / static_cast<double>(words.size());
}

double symbol_to_word_ratio(std::string_view text) {
  const auto words = split_whitespace(text);
  if (words.empty()) return 0.0;
  std::size_t symbols = 0;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '#') {
      ++symbols;
      ++i;
    } else if (text.compare(i, 3, "...") == 0 || text.compare(i, 3, "…") == 0) {
      ++symbols;
      i += 3;
    } else {
      ++i;
    }
  }
  return static_cast<double>(symbols) / static_cast<double>(words.size());
}

double alpha_word_fraction(std::string_view text) {
  const auto words = split_whitespace(text);
  if (words.empty()) return 0.0;
  std::size_t alpha = 0;
  for (auto w : words) {
    const auto cps = utf8::decode(w);
    if (std::any_of(cps.begin(), cps.end(), utf8::is_letter)) ++alpha;
  }
  return static_cast<double>(alpha) / static_cast<double>(words.size());
}

std::size_t distinct_stop_words(std::string_view text) {
  static constexpr std::array<std::string_view, 8> stop = {"the", "be", "to", "of", "and", "that", "have", "with"};
  std::array<bool, stop.size()> seen{};
  for (auto w : split_whitespace(text)) {
    const auto lw = ascii_lower(strip_edge_punct(w));
    for (std::size_t i = 0; i < stop.size(); ++i) {
      if (lw == stop[i]) seen[i] = true;
    }
  }
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

HeuristicOutcome apply_heuristics(std::string_view text, const Ruleset& ruleset, const TokenCounter& counter) {
  if (ruleset.empty()) throw Error("heuristic ruleset is empty");
  HeuristicOutcome out;
  out.text = std::string(text);
  for (const auto& rule : ruleset) {
    if (rule.scope != RuleScope::Line) continue;
    const auto lines = split_lines(out.text);
    std::string kept;
    std::size_t dropped = 0;
    bool first = true;
    for (auto line : lines) {
      if (!trim(line).empty() && !rule.keep(line)) {
        ++dropped;
        continue;
      }
      if (!first) kept.push_back('\n');
      kept.append(line);
      first = false;
    }
    if (dropped == 0) continue;
    const auto before = counter.count(out.text);
    const auto after = counter.count(kept);
    out.applied.push_back({rule.name, dropped, before - after});
    out.text = std::move(kept);
  }
  if (trim(out.text).empty()) {
    out.kept = false;
    out.drop_rule = std::string(kEmptyAfterLineRules);
  } else {
    for (const auto& rule : ruleset) {
      if (rule.scope != RuleScope::Document || rule.keep(out.text)) continue;
      out.kept = false;
      out.drop_rule = rule.name;
      break;
    }
  }
  if (!out.kept) {
    out.applied.push_back({out.drop_rule, 0, counter.count(out.text)});
    out.text.clear();
  }
  return out;
}

FilterResult filter_documents(std::vector<Document> docs, const Ruleset& ruleset, const TokenCounter& counter,
                              std::size_t workers) {
  std::vector<HeuristicOutcome> outcomes(docs.size());
  std::vector<std::uint64_t> tokens_in(docs.size());
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    tokens_in[i] = counter.count(docs[i].text);
    outcomes[i] = apply_heuristics(docs[i].text, ruleset, counter);
  });
  FilterResult result;
  auto& report = result.report;
  report.stage = "heuristics";
  report.docs_in = docs.size();
  for (const auto& rule : ruleset) report.rules[rule.name];
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto& o = outcomes[i];
    report.tokens_in += tokens_in[i];
    for (const auto& a : o.applied) {
      auto& stats = report.rules[a.rule];
      stats.lines_dropped += a.lines_dropped;
      stats.tokens_removed += a.tokens_removed;
    }
    if (!o.kept) {
      report.rules[o.drop_rule].docs_dropped += 1;
      result.dropped.push_back({docs[i].id, "heuristics", o.drop_rule});
      continue;
    }
    if (o.text != docs[i].text) docs[i].text = std::move(o.text);
    report.tokens_out += counter.count(docs[i].text);
    result.kept.push_back(std::move(docs[i]));
  }
  report.docs_out = result.kept.size();
  return result;
}

}  // namespace curate
