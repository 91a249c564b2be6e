#include "curate/pipeline/stages.hpp"

#include <fstream>

#include "curate/core/parallel.hpp"
#include "curate/core/record_io.hpp"
#include "curate/extraction/langid.hpp"

namespace curate {

StageOutput extract_stage(std::vector<Document> docs, const ExtractionParams& params, const TokenCounter& counter,
                          std::size_t workers) {
  params.validate();
  std::vector<char> had_html(docs.size(), 0);
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    auto& d = docs[i];
    const auto it = d.extra.find("html");
    if (it == d.extra.end() || !it->is_string()) return;
    had_html[i] = 1;
    d.text = extract_text(it->get_ref<const std::string&>(), params);
    d.extra.erase("html");
  });
  StageOutput out;
  out.report.stage = "extract";
  out.report.docs_in = docs.size();
  std::size_t html_docs = 0, empty = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    html_docs += static_cast<std::size_t>(had_html[i]);
    if (split_whitespace(docs[i].text).empty()) {
      ++empty;
      out.dropped.push_back({docs[i].id, "extract", "no_main_content"});
      continue;
    }
    out.report.tokens_out += counter.count(docs[i].text);
    out.docs.push_back(std::move(docs[i]));
  }
  // Extraction creates text rather than removing it; token flow starts here.
  out.report.tokens_in = out.report.tokens_out;
  out.report.docs_out = out.docs.size();
  out.report.details["html_documents"] = html_docs;
  out.report.details["no_main_content"] = empty;
  return out;
}

StageOutput langid_stage(std::vector<Document> docs, const LangIdConfig& config, const TokenCounter& counter,
                         std::size_t workers) {
  std::vector<LanguageVerdict> verdicts(docs.size());
  std::vector<std::uint64_t> tokens(docs.size());
  const LanguageDetector* detector = config.external ? nullptr : &LanguageDetector::bundled();
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    tokens[i] = counter.count(docs[i].text);
    if (detector) {
      verdicts[i] = split_whitespace(docs[i].text).empty() ? make_verdict("", 0.0, config.threshold)
                                                           : detector->detect(docs[i].text, config.threshold);
    } else if (docs[i].lang && docs[i].lang_conf) {
      verdicts[i] = external_verdict(docs[i], config.threshold);
    } else {
      verdicts[i] = make_verdict("", 0.0, config.threshold);
    }
  });
  StageOutput out;
  auto& r = out.report;
  r.stage = "langid";
  r.docs_in = docs.size();
  auto& stats = r.rules["language"];
  std::map<std::string, std::size_t> rejected_langs;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    r.tokens_in += tokens[i];
    docs[i].lang = verdicts[i].lang;
    docs[i].lang_conf = verdicts[i].confidence;
    if (!verdicts[i].accepted) {
      ++stats.docs_dropped;
      stats.tokens_removed += tokens[i];
      ++rejected_langs[verdicts[i].lang.empty() ? "none" : verdicts[i].lang];
      out.dropped.push_back({docs[i].id, "langid", "language"});
      continue;
    }
    r.tokens_out += tokens[i];
    out.docs.push_back(std::move(docs[i]));
  }
  r.docs_out = out.docs.size();
  r.details["mode"] = config.external ? "external" : "native";
  r.details["rejected_languages"] = rejected_langs;
  return out;
}

std::vector<Document> read_inputs(const InputConfig& input, std::vector<std::string>* errors) {
  std::vector<Document> docs;
  ReaderOptions opts;
  opts.default_snapshot = input.default_snapshot;
  for (const auto& path : input.paths) {
    const auto format = input.format ? *input.format : format_from_path(path);
    std::vector<RecordError> errs;
    auto part = read_records(path, format, &errs, opts);
    for (auto& d : part) docs.push_back(std::move(d));
    if (errors) {
      for (const auto& e : errs)
        errors->push_back(path.filename().string() + "@" + std::to_string(e.offset) + ": " + e.message);
    }
  }
  return docs;
}

std::vector<std::string> read_text_corpus(const std::filesystem::path& path) {
  std::vector<std::string> texts;
  const auto name = path.filename().string();
  if (name.ends_with(".jsonl") || name.ends_with(".jsonl.gz")) {
    for (auto& d : read_records(path, format_from_path(path))) texts.push_back(std::move(d.text));
    return texts;
  }
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  std::string line;
  while (std::getline(is, line)) {
    if (!split_whitespace(line).empty()) texts.push_back(line);
  }
  return texts;
}

Json dropped_to_json(const DroppedDocument& d) { return Json{{"id", d.id}, {"stage", d.stage}, {"rule", d.rule}}; }

}  // namespace curate
