#include "curate/core/document.hpp"

#include <algorithm>

#include "curate/core/error.hpp"

namespace curate {

namespace {

constexpr std::array<std::string_view, 5> kLabelNames = {"high", "medium_high", "medium",
                                                         "medium_low", "low"};
constexpr std::array<std::string_view, 5> kLabelDisplay = {"High", "Medium-High", "Medium",
                                                           "Medium-Low", "Low"};
constexpr std::array<std::string_view, 5> kPromptNames = {
    "wikipedia", "diverse_qa", "distill", "extract_knowledge", "knowledge_list"};

// Fields owned by the schema; everything else lands in Document::extra.
constexpr std::array<std::string_view, 11> kKnownFields = {
    "id", "url", "snapshot", "text", "lang", "lang_conf",
    "scores", "buckets", "final_bucket", "label", "kind"};

bool is_known_field(std::string_view key) {
  return std::find(kKnownFields.begin(), kKnownFields.end(), key) != kKnownFields.end();
}

}  // namespace

std::string_view label_name(QualityLabel label) {
  return kLabelNames[static_cast<std::size_t>(label)];
}

std::string_view label_display_name(QualityLabel label) {
  return kLabelDisplay[static_cast<std::size_t>(label)];
}

std::optional<QualityLabel> parse_label(std::string_view name) {
  for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
    if (name == kLabelNames[i] || name == kLabelDisplay[i]) return static_cast<QualityLabel>(i);
  }
  return std::nullopt;
}

QualityLabel bucket_to_label(int bucket) {
  if (bucket < 0 || bucket >= kBucketCount) {
    throw Error("bucket out of range 0..19: " + std::to_string(bucket));
  }
  if (bucket == 19) return QualityLabel::High;
  if (bucket == 18) return QualityLabel::MediumHigh;
  if (bucket >= 12) return QualityLabel::Medium;
  if (bucket >= 7) return QualityLabel::MediumLow;
  return QualityLabel::Low;
}

std::string_view prompt_kind_name(PromptKind kind) {
  return kPromptNames[static_cast<std::size_t>(kind)];
}

std::optional<PromptKind> parse_prompt_kind(std::string_view name) {
  for (std::size_t i = 0; i < kPromptNames.size(); ++i) {
    if (name == kPromptNames[i]) return static_cast<PromptKind>(i);
  }
  return std::nullopt;
}

std::string kind_string(const Document& doc) {
  if (!doc.synthetic_kind) return "real";
  return "synthetic:" + std::string(prompt_kind_name(*doc.synthetic_kind));
}

Json to_json(const Document& doc) {
  Json j = Json::object();
  j["id"] = doc.id;
  j["url"] = doc.url;
  j["snapshot"] = doc.snapshot;
  j["text"] = doc.text;
  if (doc.lang) j["lang"] = *doc.lang;
  if (doc.lang_conf) j["lang_conf"] = *doc.lang_conf;
  if (!doc.scores.empty()) {
    Json s = Json::object();
    for (const auto& [name, value] : doc.scores) s[name] = value;
    j["scores"] = std::move(s);
  }
  if (!doc.buckets.empty()) {
    Json b = Json::object();
    for (const auto& [name, value] : doc.buckets) b[name] = value;
    j["buckets"] = std::move(b);
  }
  if (doc.final_bucket) j["final_bucket"] = *doc.final_bucket;
  if (doc.label) j["label"] = std::string(label_name(*doc.label));
  j["kind"] = kind_string(doc);
  for (const auto& [key, value] : doc.extra.items()) j[key] = value;
  return j;
}

Document document_from_json(const Json& j) {
  if (!j.is_object()) throw Error("record is not a JSON object");
  Document doc;
  auto get_string = [&](const char* key, std::string& out) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return;
    if (!it->is_string()) throw Error(std::string("field '") + key + "' must be a string");
    out = it->get<std::string>();
  };
  get_string("id", doc.id);
  get_string("url", doc.url);
  get_string("snapshot", doc.snapshot);
  get_string("text", doc.text);
  if (auto it = j.find("lang"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw Error("field 'lang' must be a string");
    doc.lang = it->get<std::string>();
  }
  if (auto it = j.find("lang_conf"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) throw Error("field 'lang_conf' must be a number");
    doc.lang_conf = it->get<double>();
  }
  if (auto it = j.find("scores"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw Error("field 'scores' must be an object");
    for (const auto& [name, value] : it->items()) {
      if (!value.is_number()) throw Error("score '" + name + "' must be a number");
      doc.scores[name] = value.get<double>();
    }
  }
  // Flat "scores.<name>" columns are accepted as an ingestion convenience.
  for (const auto& [key, value] : j.items()) {
    if (key.rfind("scores.", 0) == 0 && value.is_number()) {
      doc.scores[key.substr(7)] = value.get<double>();
    }
  }
  if (auto it = j.find("buckets"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw Error("field 'buckets' must be an object");
    for (const auto& [name, value] : it->items()) {
      if (!value.is_number_integer()) throw Error("bucket '" + name + "' must be an integer");
      doc.buckets[name] = value.get<int>();
    }
  }
  if (auto it = j.find("final_bucket"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw Error("field 'final_bucket' must be an integer");
    doc.final_bucket = it->get<int>();
  }
  if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw Error("field 'label' must be a string");
    doc.label = parse_label(it->get<std::string>());
    if (!doc.label) throw Error("unknown label '" + it->get<std::string>() + "'");
  }
  if (auto it = j.find("kind"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw Error("field 'kind' must be a string");
    const auto kind = it->get<std::string>();
    if (kind != "real") {
      constexpr std::string_view prefix = "synthetic:";
      if (kind.rfind(prefix, 0) != 0) throw Error("unknown kind '" + kind + "'");
      doc.synthetic_kind = parse_prompt_kind(std::string_view(kind).substr(prefix.size()));
      if (!doc.synthetic_kind) throw Error("unknown prompt kind in '" + kind + "'");
    }
  }
  for (const auto& [key, value] : j.items()) {
    if (!is_known_field(key) && key.rfind("scores.", 0) != 0) doc.extra[key] = value;
  }
  return doc;
}

std::string check_invariants(const Document& doc) {
  if (doc.id.empty()) return "empty id";
  if (doc.lang_conf && (*doc.lang_conf < 0.0 || *doc.lang_conf > 1.0)) {
    return "lang_conf outside [0,1]";
  }
  int max_bucket = -1;
  for (const auto& [name, b] : doc.buckets) {
    if (b < 0 || b >= kBucketCount) return "bucket '" + name + "' outside 0..19";
    max_bucket = std::max(max_bucket, b);
  }
  if (doc.final_bucket) {
    if (*doc.final_bucket < 0 || *doc.final_bucket >= kBucketCount) return "final_bucket outside 0..19";
    if (!doc.buckets.empty() && *doc.final_bucket != max_bucket) return "final_bucket != max(buckets)";
  }
  if (doc.label) {
    if (!doc.final_bucket) return "label without final_bucket";
    if (bucket_to_label(*doc.final_bucket) != *doc.label) return "label inconsistent with final_bucket";
  }
  return {};
}

}  // namespace curate
