#include "curate/core/stage_report.hpp"

namespace curate {

std::uint64_t StageReport::rule_tokens_removed() const {
  std::uint64_t total = 0;
  for (const auto& [name, r] : rules) total += r.tokens_removed;
  return total;
}

bool StageReport::reconciles() const {
  if (tokens_out > tokens_in) return false;
  if (rules.empty()) return true;
  return tokens_in == tokens_out + rule_tokens_removed();
}

Json StageReport::to_json() const {
  Json j = Json::object();
  j["stage"] = stage;
  j["docs_in"] = docs_in;
  j["docs_out"] = docs_out;
  j["tokens_in"] = tokens_in;
  j["tokens_out"] = tokens_out;
  j["tokens_removed"] = tokens_removed();
  if (!rules.empty()) {
    Json r = Json::object();
    for (const auto& [name, s] : rules) {
      r[name] = {{"docs_dropped", s.docs_dropped},
                 {"lines_dropped", s.lines_dropped},
                 {"tokens_removed", s.tokens_removed}};
    }
    j["rules"] = std::move(r);
  }
  if (!details.empty()) j["details"] = details;
  return j;
}

StageReport stage_report_from_json(const Json& j) {
  StageReport r;
  r.stage = j.at("stage").get<std::string>();
  r.docs_in = j.at("docs_in").get<std::size_t>();
  r.docs_out = j.at("docs_out").get<std::size_t>();
  r.tokens_in = j.at("tokens_in").get<std::uint64_t>();
  r.tokens_out = j.at("tokens_out").get<std::uint64_t>();
  if (auto it = j.find("rules"); it != j.end()) {
    for (const auto& [name, s] : it->items()) {
      r.rules[name] = {s.at("docs_dropped").get<std::size_t>(), s.at("lines_dropped").get<std::size_t>(),
                       s.at("tokens_removed").get<std::uint64_t>()};
    }
  }
  if (auto it = j.find("details"); it != j.end()) r.details = *it;
  return r;
}

}  // namespace curate
