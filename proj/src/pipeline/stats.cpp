#include "curate/pipeline/stats.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "curate/core/error.hpp"
#include "curate/core/record_io.hpp"

namespace curate {

DatasetStats compute_stats(std::span<const Document> docs, const TokenCounter& counter) {
  DatasetStats s;
  std::map<QualityLabel, LabelRow> rows;
  for (auto l : kAllLabels) rows[l].label = l;
  std::map<std::pair<QualityLabel, PromptKind>, SyntheticRow> syn;
  for (const auto& d : docs) {
    if (!d.label) {
      ++s.unlabeled_docs;
      continue;
    }
    const auto tokens = counter.count(d.text);
    if (d.synthetic_kind) {
      auto& row = syn[{*d.label, *d.synthetic_kind}];
      row.label = *d.label;
      row.kind = *d.synthetic_kind;
      ++row.docs;
      row.tokens += tokens;
      continue;
    }
    auto& row = rows[*d.label];
    ++row.docs;
    row.tokens += tokens;
    ++s.real_docs;
    s.real_tokens += tokens;
  }
  for (auto l : kAllLabels) {
    auto row = rows[l];
    row.percent = s.real_tokens ? 100.0 * static_cast<double>(row.tokens) / static_cast<double>(s.real_tokens) : 0.0;
    s.labels.push_back(row);
  }
  for (const auto& [k, row] : syn) s.synthetic.push_back(row);
  return s;
}

DatasetStats dataset_stats(const std::filesystem::path& dir, const TokenCounter& counter) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir)) throw Error("dataset directory does not exist: " + dir.string());
  std::vector<fs::path> files;
  for (auto l : kAllLabels) {
    const auto label_dir = dir / std::string(label_name(l));
    if (!fs::is_directory(label_dir)) continue;
    for (const auto& entry : fs::recursive_directory_iterator(label_dir)) {
      const auto name = entry.path().filename().string();
      if (entry.is_regular_file() && (name.ends_with(".jsonl.gz") || name.ends_with(".jsonl")))
        files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Document> docs;
  for (const auto& f : files) {
    for (auto& d : read_records(f, format_from_path(f))) docs.push_back(std::move(d));
  }
  auto stats = compute_stats(docs, counter);
  const auto reports = dir / "reports" / "reports.json";
  if (fs::exists(reports)) {
    std::ifstream is(reports);
    const auto j = Json::parse(is, nullptr, false);
    if (!j.is_discarded() && j.contains("dedup")) {
      const auto& d = j["dedup"];
      stats.dedup = DedupAccounting{d.value("total_docs", std::uint64_t{0}), d.value("total_tokens", std::uint64_t{0}),
                                    d.value("unique_docs", std::uint64_t{0}), d.value("unique_tokens", std::uint64_t{0})};
    }
  }
  return stats;
}

Json DatasetStats::to_json() const {
  Json rows = Json::array();
  for (const auto& r : labels) {
    rows.push_back({{"label", label_name(r.label)}, {"docs", r.docs}, {"tokens", r.tokens}, {"percent", r.percent}});
  }
  Json syn = Json::array();
  for (const auto& r : synthetic) {
    syn.push_back({{"label", label_name(r.label)}, {"kind", prompt_kind_name(r.kind)}, {"docs", r.docs}, {"tokens", r.tokens}});
  }
  Json j{{"labels", rows},
         {"real_docs", real_docs},
         {"real_tokens", real_tokens},
         {"unlabeled_docs", unlabeled_docs},
         {"synthetic", syn}};
  if (dedup) {
    j["dedup"] = {{"total_docs", dedup->total_docs},
                  {"total_tokens", dedup->total_tokens},
                  {"unique_docs", dedup->unique_docs},
                  {"unique_tokens", dedup->unique_tokens}};
  }
  return j;
}

std::string DatasetStats::to_text() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << std::left << std::setw(14) << "Label" << std::right << std::setw(12) << "Docs" << std::setw(16) << "Tokens"
     << std::setw(12) << "Percent" << '\n';
  for (const auto& r : labels) {
    os << std::left << std::setw(14) << label_display_name(r.label) << std::right << std::setw(12) << r.docs
       << std::setw(16) << r.tokens << std::setw(11) << r.percent << "%\n";
  }
  os << std::left << std::setw(14) << "Total" << std::right << std::setw(12) << real_docs << std::setw(16)
     << real_tokens << '\n';
  if (!synthetic.empty()) {
    os << '\n'
       << std::left << std::setw(14) << "Source" << std::setw(20) << "Prompt" << std::right << std::setw(12) << "Docs"
       << std::setw(16) << "Tokens" << '\n';
    for (const auto& r : synthetic) {
      os << std::left << std::setw(14) << label_display_name(r.label) << std::setw(20) << prompt_kind_name(r.kind)
         << std::right << std::setw(12) << r.docs << std::setw(16) << r.tokens << '\n';
    }
  }
  if (dedup) {
    os << "\nBefore dedup: " << dedup->total_docs << " docs, " << dedup->total_tokens << " tokens\n"
       << "Unique:       " << dedup->unique_docs << " docs, " << dedup->unique_tokens << " tokens\n";
  }
  return os.str();
}

}  // namespace curate
