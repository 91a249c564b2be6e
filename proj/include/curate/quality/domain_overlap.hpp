#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curate/core/document.hpp"

namespace curate {

inline constexpr std::string_view kUnknownDomain = "unknown";

/// Lower-cased registrable domain of an http(s) URL: the last two host
/// labels, or three when the last two form a known second-level public
/// suffix (co.uk, com.au, ...). IP hosts are returned as-is. nullopt when
/// no host can be parsed.
std::optional<std::string> registrable_domain(std::string_view url);

struct DomainCount {
  std::string domain;
  std::size_t docs = 0;
  friend bool operator==(const DomainCount&, const DomainCount&) = default;
};

// Comparison of the documents two scorers consider high quality: the
// document-level union/intersection split and the overlap of each side's
// top-k domains.
struct DomainOverlapReport {
  std::size_t top_k = 0;
  std::size_t docs_union = 0;
  std::size_t docs_both = 0;
  std::size_t docs_only_a = 0;
  std::size_t docs_only_b = 0;
  double pct_both = 0;  // of the union
  double pct_only_a = 0;
  double pct_only_b = 0;
  std::vector<DomainCount> top_a;  // by count desc, then domain
  std::vector<DomainCount> top_b;
  std::vector<std::string> top_intersection;  // sorted
  std::vector<std::string> top_only_a;
  std::vector<std::string> top_only_b;

  Json to_json() const;
  std::string to_text(const std::string& name_a, const std::string& name_b) const;
};

/// Documents are identified by id; a document appearing in both inputs is
/// counted once. Unparseable URLs go to the "unknown" domain.
DomainOverlapReport domain_overlap_report(std::span<const Document> docs_a, std::span<const Document> docs_b,
                                          std::size_t top_k);

}  // namespace curate
