#include "curate/quality/scorer.hpp"

#include <cmath>
#include <fstream>

#include "curate/core/binary_io.hpp"
#include "curate/core/error.hpp"
#include "curate/core/parallel.hpp"

namespace curate {

namespace {

constexpr std::string_view kMagic = "NQLS1";
constexpr std::uint32_t kVersion = 1;

class ExternalScorer final : public Scorer {
 public:
  explicit ExternalScorer(std::string name) : Scorer(std::move(name)) {}
  double score(const Document& doc) const override {
    const auto it = doc.scores.find(name());
    if (it == doc.scores.end()) throw Error("document " + doc.id + " lacks external score " + name());
    if (!std::isfinite(it->second)) throw Error("document " + doc.id + " has a non-finite score " + name());
    return it->second;
  }
};

class NgramScorer final : public Scorer {
 public:
  NgramScorer(std::string name, NgramClassifier model) : Scorer(std::move(name)), model_(std::move(model)) {}
  double score(const Document& doc) const override { return model_.score(doc.text); }

 private:
  NgramClassifier model_;
};

class HeadScorer final : public Scorer {
 public:
  HeadScorer(std::string name, RegressionHead head, std::string field)
      : Scorer(std::move(name)), head_(std::move(head)), field_(std::move(field)) {}
  double score(const Document& doc) const override {
    const auto it = doc.extra.find(field_);
    if (it == doc.extra.end() || !it->is_array())
      throw Error("document " + doc.id + " has no embedding array '" + field_ + "'");
    std::vector<double> v;
    v.reserve(it->size());
    for (const auto& x : *it) {
      if (!x.is_number()) throw Error("document " + doc.id + ": embedding values must be numbers");
      v.push_back(x.get<double>());
    }
    return head_.predict(v);
  }

 private:
  RegressionHead head_;
  std::string field_;
};

}  // namespace

std::string_view scorer_kind_name(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::NgramLinear: return "ngram_linear";
    case ScorerKind::RegressionHead: return "regression_head";
    case ScorerKind::ExternalScores: return "external_scores";
  }
  throw Error("invalid scorer kind");
}

std::optional<ScorerKind> parse_scorer_kind(std::string_view name) {
  for (auto k : {ScorerKind::NgramLinear, ScorerKind::RegressionHead, ScorerKind::ExternalScores}) {
    if (scorer_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

ScorerSpec ScorerSpec::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    throw ConfigError("scorer entries need a string \"name\"");
  ScorerSpec s;
  s.name = j["name"].get<std::string>();
  const auto kind = j.value("kind", std::string("external_scores"));
  const auto parsed = parse_scorer_kind(kind);
  if (!parsed) throw ConfigError("scorer " + s.name + ": unknown kind '" + kind + "'");
  s.kind = *parsed;
  s.model_path = j.value("model", std::string());
  s.embedding_field = j.value("embedding_field", std::string("embedding"));
  s.in_ensemble = j.value("in_ensemble", true);
  if (s.kind != ScorerKind::ExternalScores && s.model_path.empty())
    throw ConfigError("scorer " + s.name + ": kind " + kind + " needs a \"model\" path");
  return s;
}

Json ScorerSpec::to_json() const {
  Json j{{"name", name}, {"kind", scorer_kind_name(kind)}};
  if (!model_path.empty()) j["model"] = model_path;
  if (kind == ScorerKind::RegressionHead) j["embedding_field"] = embedding_field;
  j["in_ensemble"] = in_ensemble;
  return j;
}

void save_scorer_model(const std::filesystem::path& path, const ScorerModel& model) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  binio::put_u32(os, kVersion);
  if (const auto* c = std::get_if<NgramClassifier>(&model)) {
    binio::put_u32(os, static_cast<std::uint32_t>(ScorerKind::NgramLinear));
    c->write(os);
  } else {
    binio::put_u32(os, static_cast<std::uint32_t>(ScorerKind::RegressionHead));
    std::get<RegressionHead>(model).write(os);
  }
  if (!os) throw Error("failed writing " + path.string());
}

ScorerModel load_scorer_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  binio::expect_magic(is, kMagic, "NQLS1 scorer model");
  const auto version = binio::get_u32(is);
  if (version != kVersion) throw Error("unsupported scorer model version " + std::to_string(version));
  switch (static_cast<ScorerKind>(binio::get_u32(is))) {
    case ScorerKind::NgramLinear: return NgramClassifier::read(is);
    case ScorerKind::RegressionHead: return RegressionHead::read(is);
    default: throw Error(path.string() + ": unknown scorer model kind");
  }
}

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec, ScorerModel model) {
  switch (spec.kind) {
    case ScorerKind::ExternalScores: return std::make_unique<ExternalScorer>(spec.name);
    case ScorerKind::NgramLinear:
      if (!std::holds_alternative<NgramClassifier>(model))
        throw ConfigError("scorer " + spec.name + ": model is not an n-gram classifier");
      return std::make_unique<NgramScorer>(spec.name, std::get<NgramClassifier>(std::move(model)));
    case ScorerKind::RegressionHead:
      if (!std::holds_alternative<RegressionHead>(model))
        throw ConfigError("scorer " + spec.name + ": model is not a regression head");
      return std::make_unique<HeadScorer>(spec.name, std::get<RegressionHead>(std::move(model)), spec.embedding_field);
  }
  throw Error("invalid scorer kind");
}

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec) {
  if (spec.kind == ScorerKind::ExternalScores) return std::make_unique<ExternalScorer>(spec.name);
  return make_scorer(spec, load_scorer_model(spec.model_path));
}

void score_documents(std::span<Document> docs, std::span<const std::unique_ptr<Scorer>> scorers,
                     std::size_t workers) {
  std::vector<std::vector<double>> out(docs.size(), std::vector<double>(scorers.size()));
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    for (std::size_t s = 0; s < scorers.size(); ++s) out[i][s] = scorers[s]->score(docs[i]);
  });
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (std::size_t s = 0; s < scorers.size(); ++s) docs[i].scores[scorers[s]->name()] = out[i][s];
  }
}

}  // namespace curate
