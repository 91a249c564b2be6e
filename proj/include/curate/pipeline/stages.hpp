#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/error.hpp"
#include "curate/core/stage_report.hpp"
#include "curate/core/token_counter.hpp"
#include "curate/extraction/extractor.hpp"
#include "curate/heuristics/ngram_lm.hpp"
#include "curate/heuristics/rules.hpp"
#include "curate/pipeline/config.hpp"

namespace curate {

// A fatal failure inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("stage " + stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageOutput {
  std::vector<Document> docs;
  std::vector<DroppedDocument> dropped;
  StageReport report;
};

/// Replaces extra["html"] with the extracted main text; documents without
/// HTML pass through. Documents with no main content are dropped.
StageOutput extract_stage(std::vector<Document> docs, const ExtractionParams& params, const TokenCounter& counter,
                          std::size_t workers = 1);

/// Sets lang/lang_conf (native detector unless `config.external`) and drops
/// documents whose verdict is not accepted.
StageOutput langid_stage(std::vector<Document> docs, const LangIdConfig& config, const TokenCounter& counter,
                         std::size_t workers = 1);

/// Reads every input path (format by extension unless forced).
std::vector<Document> read_inputs(const InputConfig& input, std::vector<std::string>* errors = nullptr);

/// Texts for LM training: JSONL(.gz) records or one text per non-blank line.
std::vector<std::string> read_text_corpus(const std::filesystem::path& path);

Json dropped_to_json(const DroppedDocument& d);

}  // namespace curate
