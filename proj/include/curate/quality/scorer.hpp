#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/quality/ngram_classifier.hpp"
#include "curate/quality/regression_head.hpp"

namespace curate {

enum class ScorerKind { NgramLinear, RegressionHead, ExternalScores };

std::string_view scorer_kind_name(ScorerKind kind);  // "ngram_linear"
std::optional<ScorerKind> parse_scorer_kind(std::string_view name);

struct ScorerSpec {
  std::string name;
  ScorerKind kind = ScorerKind::ExternalScores;
  std::string model_path;                    // ngram_linear / regression_head
  std::string embedding_field = "embedding";  // regression_head: array in doc extras
  bool in_ensemble = true;

  static ScorerSpec from_json(const Json& j);
  Json to_json() const;
};

// Scorer model files: "NQLS1", u32 version, u32 kind, then the model body.
using ScorerModel = std::variant<NgramClassifier, RegressionHead>;
void save_scorer_model(const std::filesystem::path& path, const ScorerModel& model);
ScorerModel load_scorer_model(const std::filesystem::path& path);

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double score(const Document& doc) const = 0;
  const std::string& name() const { return name_; }

 protected:
  explicit Scorer(std::string name) : name_(std::move(name)) {}

 private:
  std::string name_;
};

/// Loads the model referenced by the spec when the kind needs one.
std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec);
std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec, ScorerModel model);

/// doc.scores[name] = scorer.score(doc) for every document and scorer.
void score_documents(std::span<Document> docs, std::span<const std::unique_ptr<Scorer>> scorers,
                     std::size_t workers = 1);

}  // namespace curate
