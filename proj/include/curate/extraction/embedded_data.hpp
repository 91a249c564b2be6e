#pragma once

#include <string_view>
#include <vector>

namespace curate {

struct LanguageSample {
  std::string_view lang;
  std::string_view words;  // newline-separated common words
};

/// Bundled English stopword list, one lowercase word per line.
std::string_view embedded_stopwords_en();
/// Bundled per-language word lists used to train the language detector.
const std::vector<LanguageSample>& embedded_language_samples();

}  // namespace curate
