#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "curate/core/document.hpp"

namespace curate {

struct RuleStats {
  std::size_t docs_dropped = 0;
  std::size_t lines_dropped = 0;
  std::uint64_t tokens_removed = 0;

  RuleStats& operator+=(const RuleStats& o) {
    docs_dropped += o.docs_dropped;
    lines_dropped += o.lines_dropped;
    tokens_removed += o.tokens_removed;
    return *this;
  }
  friend bool operator==(const RuleStats&, const RuleStats&) = default;
};

// Document and token flow through one stage. When `rules` is populated its
// tokens_removed column accounts for every token lost by the stage.
struct StageReport {
  std::string stage;
  std::size_t docs_in = 0;
  std::size_t docs_out = 0;
  std::uint64_t tokens_in = 0;
  std::uint64_t tokens_out = 0;
  std::map<std::string, RuleStats> rules;
  Json details = Json::object();

  std::uint64_t tokens_removed() const { return tokens_in - tokens_out; }
  std::uint64_t rule_tokens_removed() const;
  /// tokens_in == tokens_out + sum of per-rule removals (trivially true
  /// when no per-rule breakdown is recorded).
  bool reconciles() const;
  Json to_json() const;
};

StageReport stage_report_from_json(const Json& j);

}  // namespace curate
