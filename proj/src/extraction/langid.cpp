#include "curate/extraction/langid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "curate/core/error.hpp"
#include "curate/core/hashing.hpp"
#include "curate/extraction/embedded_data.hpp"
#include "curate/extraction/utf8.hpp"

namespace curate {

namespace {

std::vector<std::string_view> split_lines(std::string_view data) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t end = data.find('\n', start);
    if (end == std::string_view::npos) end = data.size();
    auto line = data.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
    start = end + 1;
  }
  return out;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

}  // namespace

LanguageVerdict make_verdict(std::string lang, double confidence, double threshold) {
  LanguageVerdict v;
  v.accepted = lang == "en" && confidence >= threshold;
  v.lang = std::move(lang);
  v.confidence = confidence;
  return v;
}

LanguageDetector::Features LanguageDetector::featurize(std::string_view text) const {
  // Normalise: case-fold, keep letters, collapse everything else to a
  // single space, pad with spaces so word edges form n-grams.
  std::vector<char32_t> cps{U' '};
  for (char32_t cp : utf8::decode(text)) {
    if (utf8::is_letter(cp)) {
      cps.push_back(utf8::to_lower(cp));
    } else if (cps.back() != U' ') {
      cps.push_back(U' ');
    }
  }
  if (cps.back() != U' ') cps.push_back(U' ');

  const std::uint32_t mask = (1u << hash_bits_) - 1;
  std::map<std::uint32_t, float> counts;
  std::string gram;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    for (std::size_t n = 1; n <= 4 && i + n <= cps.size(); ++n) {
      if (n == 1 && cps[i] == U' ') continue;
      gram.clear();
      for (std::size_t k = 0; k < n; ++k) utf8::append(gram, cps[i + k]);
      const auto h = static_cast<std::uint32_t>(mix64(fnv1a64(gram) + n) & mask);
      counts[h] += 1.0f;
    }
  }
  Features f(counts.begin(), counts.end());
  double norm = 0.0;
  for (const auto& [idx, v] : f) norm += static_cast<double>(v) * v;
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (auto& [idx, v] : f) v = static_cast<float>(v / norm);
  }
  return f;
}

LanguageDetector LanguageDetector::train(const std::vector<Example>& examples, LangIdTrainOptions options) {
  if (examples.empty()) throw Error("language detector: no training examples");
  LanguageDetector det;
  det.hash_bits_ = options.hash_bits;
  std::map<std::string, std::size_t> index;
  for (const auto& e : examples) index.emplace(e.lang, 0);
  for (auto& [lang, i] : index) {
    i = det.languages_.size();
    det.languages_.push_back(lang);
  }
  const std::size_t L = det.languages_.size();
  const std::size_t D = std::size_t{1} << det.hash_bits_;
  det.weights_.assign(L * D, 0.0f);
  det.bias_.assign(L, 0.0f);

  std::vector<std::pair<std::size_t, Features>> data;
  data.reserve(examples.size());
  for (const auto& e : examples) data.emplace_back(index.at(e.lang), det.featurize(e.text));

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(options.seed);
  std::vector<double> logits(L);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    const double lr = options.learning_rate / (1.0 + static_cast<double>(epoch));
    for (std::size_t idx : order) {
      const auto& [label, feats] = data[idx];
      double max_logit = -1e300;
      for (std::size_t l = 0; l < L; ++l) {
        double z = det.bias_[l];
        const float* w = det.weights_.data() + l * D;
        for (const auto& [f, v] : feats) z += static_cast<double>(w[f]) * v;
        logits[l] = z;
        max_logit = std::max(max_logit, z);
      }
      double sum = 0.0;
      for (auto& z : logits) {
        z = std::exp(z - max_logit);
        sum += z;
      }
      for (std::size_t l = 0; l < L; ++l) {
        const double grad = logits[l] / sum - (l == label ? 1.0 : 0.0);
        if (std::abs(grad) < 1e-6) continue;
        float* w = det.weights_.data() + l * D;
        for (const auto& [f, v] : feats) w[f] -= static_cast<float>(lr * grad * v);
        det.bias_[l] -= static_cast<float>(lr * grad * 0.1);
      }
    }
  }
  return det;
}

std::vector<LanguageDetector::Example> LanguageDetector::sample_sentences(std::size_t per_language,
                                                                          std::uint64_t seed,
                                                                          std::size_t holdout_mod,
                                                                          bool holdout_only) {
  std::vector<Example> out;
  std::mt19937_64 rng(seed);
  for (const auto& sample : embedded_language_samples()) {
    const auto all = split_lines(sample.words);
    std::vector<std::string_view> words;
    for (std::size_t i = 0; i < all.size(); ++i) {
      const bool held = holdout_mod > 0 && i % holdout_mod == 0;
      if (held == holdout_only || holdout_mod == 0) words.push_back(all[i]);
    }
    if (words.empty()) continue;
    for (std::size_t s = 0; s < per_language; ++s) {
      const std::size_t len = 3 + uniform_index(rng, 10);
      std::string text;
      for (std::size_t k = 0; k < len; ++k) {
        if (k) text.push_back(' ');
        text.append(words[uniform_index(rng, words.size())]);
      }
      text.push_back('.');
      out.push_back({std::string(sample.lang), std::move(text)});
    }
  }
  return out;
}

const LanguageDetector& LanguageDetector::bundled() {
  static const LanguageDetector det = train(sample_sentences(800, 20240521));
  return det;
}

std::vector<std::pair<std::string, double>> LanguageDetector::probabilities(std::string_view text) const {
  const auto feats = featurize(text);
  const std::size_t D = std::size_t{1} << hash_bits_;
  std::vector<double> logits(languages_.size());
  double max_logit = -1e300;
  for (std::size_t l = 0; l < languages_.size(); ++l) {
    double z = bias_[l];
    const float* w = weights_.data() + l * D;
    for (const auto& [f, v] : feats) z += static_cast<double>(w[f]) * v;
    logits[l] = z;
    max_logit = std::max(max_logit, z);
  }
  double sum = 0.0;
  for (auto& z : logits) {
    z = std::exp(z - max_logit);
    sum += z;
  }
  std::vector<std::pair<std::string, double>> out;
  out.reserve(languages_.size());
  for (std::size_t l = 0; l < languages_.size(); ++l) out.emplace_back(languages_[l], logits[l] / sum);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

LanguageVerdict LanguageDetector::detect(std::string_view text, double threshold) const {
  if (text.empty()) throw Error("empty input");
  const auto probs = probabilities(text);
  return make_verdict(probs.front().first, probs.front().second, threshold);
}

LanguageVerdict external_verdict(const Document& doc, double threshold) {
  if (!doc.lang || !doc.lang_conf) throw Error("document '" + doc.id + "' carries no language verdict");
  return make_verdict(*doc.lang, *doc.lang_conf, threshold);
}

}  // namespace curate
