#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/stage_report.hpp"
#include "curate/core/token_counter.hpp"

namespace curate {

enum class RuleScope { Document, Line };

// A named keep/drop predicate over either a whole text or a single line.
// Rules are immutable after construction and safe to share across threads.
struct FilterRule {
  std::string name;
  RuleScope scope = RuleScope::Document;
  std::map<std::string, double> params;
  std::function<bool(std::string_view)> keep;
};

using Ruleset = std::vector<FilterRule>;

/// Names accepted by make_rule, in default declaration order.
const std::vector<std::string>& known_rule_names();
/// Builds a rule; `overrides` replaces individual default parameters.
/// Throws ConfigError for an unknown name or parameter.
FilterRule make_rule(const std::string& name, const std::map<std::string, double>& overrides = {});
/// Every known rule with default parameters.
Ruleset default_ruleset();
/// Parses [{"name": ..., "enabled": bool, "params": {...}}, ...].
Ruleset ruleset_from_json(const Json& j);

// Individual measurements, exposed for tests and reports.
std::size_t count_sentences(std::string_view text);
double mean_word_length(std::string_view text);
double symbol_to_word_ratio(std::string_view text);
double alpha_word_fraction(std::string_view text);
std::size_t distinct_stop_words(std::string_view text);

struct RuleApplication {
  std::string rule;
  std::size_t lines_dropped = 0;
  std::uint64_t tokens_removed = 0;
};

struct HeuristicOutcome {
  bool kept = true;
  std::string drop_rule;  // set when !kept
  std::string text;       // line-trimmed text when kept
  std::vector<RuleApplication> applied;  // every rule that removed something
};

inline constexpr std::string_view kEmptyAfterLineRules = "empty_after_line_rules";

/// Line rules run first in declared order, each removing failing lines;
/// blank lines are never judged. Document rules then run on the trimmed
/// text and the first failing one names the drop.
HeuristicOutcome apply_heuristics(std::string_view text, const Ruleset& ruleset, const TokenCounter& counter);

struct DroppedDocument {
  std::string id;
  std::string stage;
  std::string rule;
};

struct FilterResult {
  std::vector<Document> kept;
  std::vector<DroppedDocument> dropped;
  StageReport report;
};

FilterResult filter_documents(std::vector<Document> docs, const Ruleset& ruleset, const TokenCounter& counter,
                              std::size_t workers = 1);

}  // namespace curate
