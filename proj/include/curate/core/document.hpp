#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace curate {

using Json = nlohmann::ordered_json;

/// Five-level quality grouping of the 20 ensemble buckets.
enum class QualityLabel { High, MediumHigh, Medium, MediumLow, Low };

inline constexpr std::array<QualityLabel, 5> kAllLabels = {
    QualityLabel::High, QualityLabel::MediumHigh, QualityLabel::Medium,
    QualityLabel::MediumLow, QualityLabel::Low};

/// Machine name used in JSON and partition directories ("medium_high").
std::string_view label_name(QualityLabel label);
/// Human-readable name used in report tables ("Medium-High").
std::string_view label_display_name(QualityLabel label);
std::optional<QualityLabel> parse_label(std::string_view name);

/// 19 -> High, 18 -> MediumHigh, 12..17 -> Medium, 7..11 -> MediumLow,
/// 0..6 -> Low. Throws curate::Error for buckets outside 0..19.
QualityLabel bucket_to_label(int bucket);

inline constexpr int kBucketCount = 20;

/// The five synthetic-generation prompt styles.
enum class PromptKind { Wikipedia, DiverseQA, Distill, ExtractKnowledge, KnowledgeList };

inline constexpr std::array<PromptKind, 5> kAllPromptKinds = {
    PromptKind::Wikipedia, PromptKind::DiverseQA, PromptKind::Distill,
    PromptKind::ExtractKnowledge, PromptKind::KnowledgeList};

std::string_view prompt_kind_name(PromptKind kind);  // "diverse_qa"
std::optional<PromptKind> parse_prompt_kind(std::string_view name);

// One crawl record plus every per-stage annotation. Fields that the schema
// does not know about are carried in `extra` and written back verbatim.
struct Document {
  std::string id;
  std::string url;
  std::string snapshot;
  std::string text;
  std::optional<std::string> lang;
  std::optional<double> lang_conf;
  std::map<std::string, double> scores;
  std::map<std::string, int> buckets;
  std::optional<int> final_bucket;
  std::optional<QualityLabel> label;
  std::optional<PromptKind> synthetic_kind;  // nullopt for real documents
  Json extra = Json::object();

  bool is_synthetic() const { return synthetic_kind.has_value(); }

  friend bool operator==(const Document&, const Document&) = default;
};

/// "real" or "synthetic:<prompt kind>".
std::string kind_string(const Document& doc);

Json to_json(const Document& doc);
/// Throws curate::Error when a known field has the wrong type.
Document document_from_json(const Json& j);

/// Checks the documented invariants (non-empty id, bucket ranges,
/// final_bucket == max(buckets), label consistent with final_bucket).
/// Returns an empty string when valid, otherwise a description.
std::string check_invariants(const Document& doc);

}  // namespace curate
