#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curate/core/document.hpp"

namespace curate {

struct LanguageVerdict {
  std::string lang;
  double confidence = 0.0;
  bool accepted = false;
};

inline constexpr double kDefaultLanguageThreshold = 0.3;

/// accepted <=> lang == "en" && confidence >= threshold.
LanguageVerdict make_verdict(std::string lang, double confidence,
                             double threshold = kDefaultLanguageThreshold);

struct LangIdTrainOptions {
  std::uint32_t hash_bits = 18;
  std::size_t epochs = 8;
  double learning_rate = 0.5;
  std::uint64_t seed = 17;
};

// Softmax-linear classifier over hashed character 1- to 4-grams of the
// case-folded, letters-only text.
class LanguageDetector {
 public:
  struct Example {
    std::string lang;
    std::string text;
  };

  static LanguageDetector train(const std::vector<Example>& examples, LangIdTrainOptions options = {});

  /// Trained once per process from the bundled word lists.
  static const LanguageDetector& bundled();

  /// Pseudo-sentences drawn from per-language word lists. `holdout_mod`
  /// > 0 excludes every word whose index % holdout_mod == 0 (and returns
  /// only those words when `holdout_only`).
  static std::vector<Example> sample_sentences(std::size_t per_language, std::uint64_t seed,
                                               std::size_t holdout_mod = 0, bool holdout_only = false);

  /// Throws curate::Error("empty input") for empty text.
  LanguageVerdict detect(std::string_view text, double threshold = kDefaultLanguageThreshold) const;
  std::vector<std::pair<std::string, double>> probabilities(std::string_view text) const;

  const std::vector<std::string>& languages() const { return languages_; }

 private:
  using Features = std::vector<std::pair<std::uint32_t, float>>;
  Features featurize(std::string_view text) const;

  std::uint32_t hash_bits_ = 18;
  std::vector<std::string> languages_;
  std::vector<float> weights_;  // languages x 2^hash_bits, row-major
  std::vector<float> bias_;
};

/// Verdict from a precomputed lang/lang_conf pair on the document, for
/// ingesting an external detector's output.
LanguageVerdict external_verdict(const Document& doc, double threshold = kDefaultLanguageThreshold);

}  // namespace curate
