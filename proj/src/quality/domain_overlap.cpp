#include "curate/quality/domain_overlap.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "curate/core/error.hpp"

namespace curate {

namespace {

constexpr std::array<std::string_view, 24> kSecondLevelSuffixes = {
    "co.uk",  "org.uk", "ac.uk",  "gov.uk", "me.uk",  "com.au", "net.au", "org.au",
    "edu.au", "gov.au", "co.nz",  "org.nz", "co.jp",  "ac.jp",  "or.jp",  "com.br",
    "com.cn", "net.cn", "org.cn", "co.in",  "co.za",  "com.mx", "com.tr", "co.kr"};

bool is_ipv4(std::string_view host) {
  int dots = 0;
  for (char c : host) {
    if (c == '.') {
      ++dots;
    } else if (c < '0' || c > '9') {
      return false;
    }
  }
  return dots == 3;
}

std::vector<DomainCount> rank_domains(std::span<const Document> docs) {
  std::map<std::string, std::size_t> counts;
  std::set<std::string> seen;
  for (const auto& d : docs) {
    if (!seen.insert(d.id).second) continue;
    ++counts[registrable_domain(d.url).value_or(std::string(kUnknownDomain))];
  }
  std::vector<DomainCount> out;
  for (auto& [dom, n] : counts) out.push_back({dom, n});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.docs > b.docs; });
  return out;
}

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

std::optional<std::string> registrable_domain(std::string_view url) {
  auto scheme = url.find("://");
  if (scheme == std::string_view::npos) return std::nullopt;
  std::string_view rest = url.substr(scheme + 3);
  rest = rest.substr(0, rest.find_first_of("/?#"));
  if (auto at = rest.rfind('@'); at != std::string_view::npos) rest = rest.substr(at + 1);
  if (!rest.empty() && rest.front() == '[') {
    const auto close = rest.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(rest.substr(0, close + 1));
  }
  rest = rest.substr(0, rest.find(':'));
  std::string host;
  for (char c : rest) host.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty()) return std::nullopt;
  for (char c : host) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' ||
                    static_cast<unsigned char>(c) >= 0x80;
    if (!ok) return std::nullopt;
  }
  if (is_ipv4(host)) return host;
  std::vector<std::string_view> labels;
  std::string_view h = host;
  for (std::size_t start = 0;;) {
    const auto dot = h.find('.', start);
    labels.push_back(h.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  if (labels.size() < 2 || std::any_of(labels.begin(), labels.end(), [](auto l) { return l.empty(); }))
    return std::nullopt;
  std::size_t keep = 2;
  const std::string last_two = std::string(labels[labels.size() - 2]) + "." + std::string(labels.back());
  if (std::find(kSecondLevelSuffixes.begin(), kSecondLevelSuffixes.end(), last_two) != kSecondLevelSuffixes.end()) {
    if (labels.size() < 3) return std::nullopt;
    keep = 3;
  }
  std::string out;
  for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out.append(labels[i]);
  }
  return out;
}

DomainOverlapReport domain_overlap_report(std::span<const Document> docs_a, std::span<const Document> docs_b,
                                          std::size_t top_k) {
  if (top_k == 0) throw Error("top_k must be positive");
  DomainOverlapReport r;
  r.top_k = top_k;
  std::set<std::string> ids_a, ids_b;
  for (const auto& d : docs_a) ids_a.insert(d.id);
  for (const auto& d : docs_b) ids_b.insert(d.id);
  for (const auto& id : ids_a) (ids_b.count(id) ? r.docs_both : r.docs_only_a) += 1;
  r.docs_only_b = ids_b.size() - r.docs_both;
  r.docs_union = r.docs_both + r.docs_only_a + r.docs_only_b;
  r.pct_both = percent(r.docs_both, r.docs_union);
  r.pct_only_a = percent(r.docs_only_a, r.docs_union);
  r.pct_only_b = percent(r.docs_only_b, r.docs_union);

  r.top_a = rank_domains(docs_a);
  r.top_b = rank_domains(docs_b);
  if (r.top_a.size() > top_k) r.top_a.resize(top_k);
  if (r.top_b.size() > top_k) r.top_b.resize(top_k);
  std::set<std::string> set_a, set_b;
  for (const auto& d : r.top_a) set_a.insert(d.domain);
  for (const auto& d : r.top_b) set_b.insert(d.domain);
  std::set_intersection(set_a.begin(), set_a.end(), set_b.begin(), set_b.end(), std::back_inserter(r.top_intersection));
  std::set_difference(set_a.begin(), set_a.end(), set_b.begin(), set_b.end(), std::back_inserter(r.top_only_a));
  std::set_difference(set_b.begin(), set_b.end(), set_a.begin(), set_a.end(), std::back_inserter(r.top_only_b));
  return r;
}

Json DomainOverlapReport::to_json() const {
  auto counts = [](const std::vector<DomainCount>& v) {
    Json a = Json::array();
    for (const auto& d : v) a.push_back({{"domain", d.domain}, {"docs", d.docs}});
    return a;
  };
  return Json{{"documents",
               {{"union", docs_union},
                {"both", docs_both},
                {"only_a", docs_only_a},
                {"only_b", docs_only_b},
                {"pct_both", pct_both},
                {"pct_only_a", pct_only_a},
                {"pct_only_b", pct_only_b}}},
              {"domains",
               {{"top_k", top_k},
                {"top_a", counts(top_a)},
                {"top_b", counts(top_b)},
                {"intersection", top_intersection},
                {"only_a", top_only_a},
                {"only_b", top_only_b}}}};
}

std::string DomainOverlapReport::to_text(const std::string& name_a, const std::string& name_b) const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << "What                     #Docs   Total unique(%)\n";
  auto row = [&](const std::string& what, std::size_t n, double pct) {
    os << std::left << std::setw(24) << what << ' ' << std::right << std::setw(6) << n << "   " << pct << "%\n";
  };
  row("Total unique in union", docs_union, docs_union ? 100.0 : 0.0);
  row("In intersection", docs_both, pct_both);
  row("In " + name_a + " only", docs_only_a, pct_only_a);
  row("In " + name_b + " only", docs_only_b, pct_only_b);
  os << "\n" << top_intersection.size() << " domains are in the top " << top_k << " domains of both\n";
  os << name_a << " top domains:\n";
  for (const auto& d : top_a) os << "  " << d.domain << ' ' << d.docs << '\n';
  os << name_b << " top domains:\n";
  for (const auto& d : top_b) os << "  " << d.domain << ' ' << d.docs << '\n';
  return os.str();
}

}  // namespace curate
