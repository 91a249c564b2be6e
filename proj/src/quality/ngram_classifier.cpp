#include "curate/quality/ngram_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "curate/core/binary_io.hpp"
#include "curate/core/error.hpp"
#include "curate/core/hashing.hpp"
#include "curate/core/token_counter.hpp"
#include "curate/extraction/utf8.hpp"

namespace curate {

namespace {

std::string fold(std::string_view word) {
  std::string out;
  for (char32_t cp : utf8::decode(word)) utf8::append(out, utf8::to_lower(cp));
  return out;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void NgramClassifierOptions::validate() const {
  if (hash_bits < 4 || hash_bits > 28) throw Error("classifier hash_bits must be in [4, 28]");
  if (epochs == 0) throw Error("classifier epochs must be positive");
  if (!(learning_rate > 0)) throw Error("classifier learning rate must be positive");
}

std::vector<NgramClassifier::Feature> NgramClassifier::features(std::string_view text, unsigned hash_bits) {
  const std::uint64_t mask = (std::uint64_t{1} << hash_bits) - 1;
  std::map<std::uint32_t, double> counts;
  std::string prev;
  for (auto w : split_whitespace(text)) {
    auto word = fold(w);
    counts[static_cast<std::uint32_t>(mix64(fnv1a64(word)) & mask)] += 1;
    if (!prev.empty()) {
      const auto h = fnv1a64(word, fnv1a64(" ", fnv1a64(prev)));
      counts[static_cast<std::uint32_t>(mix64(h ^ 0x5bd1e995ULL) & mask)] += 1;
    }
    prev = std::move(word);
  }
  double norm = 0;
  for (const auto& [i, c] : counts) norm += c * c;
  norm = std::sqrt(norm);
  std::vector<Feature> out(counts.begin(), counts.end());
  for (auto& f : out) f.second /= norm;
  return out;
}

NgramClassifier NgramClassifier::train(std::span<const LabeledText> examples, const std::string& positive_label,
                                       const NgramClassifierOptions& options) {
  options.validate();
  std::map<std::string, std::size_t> per_label;
  for (const auto& e : examples) ++per_label[e.label];
  if (per_label.size() < 2) throw Error("classifier training needs at least two classes");
  if (!per_label.count(positive_label)) throw Error("positive class '" + positive_label + "' has no examples");
  for (const auto& [label, n] : per_label) {
    if (n < 10) throw Error("class '" + label + "' has fewer than 10 examples");
  }

  std::vector<std::vector<Feature>> feats(examples.size());
  std::vector<double> target(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    feats[i] = features(examples[i].text, options.hash_bits);
    target[i] = examples[i].label == positive_label ? 1.0 : 0.0;
  }
  std::vector<double> w(std::size_t{1} << options.hash_bits, 0.0);
  double bias = 0;
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (auto idx : order) {
      double z = bias;
      for (const auto& [j, x] : feats[idx]) z += w[j] * x;
      const double g = target[idx] - sigmoid(z);
      bias += options.learning_rate * g;
      for (const auto& [j, x] : feats[idx]) w[j] += options.learning_rate * g * x;
    }
  }
  NgramClassifier model;
  model.positive_label_ = positive_label;
  model.hash_bits_ = options.hash_bits;
  model.bias_ = bias;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) model.weights_.emplace_back(static_cast<std::uint32_t>(j), w[j]);
  }
  return model;
}

double NgramClassifier::logit(std::string_view text) const {
  double z = bias_;
  for (const auto& [j, x] : features(text, hash_bits_)) {
    const auto it = std::lower_bound(weights_.begin(), weights_.end(), j,
                                     [](const auto& p, std::uint32_t k) { return p.first < k; });
    if (it != weights_.end() && it->first == j) z += it->second * x;
  }
  return z;
}

double NgramClassifier::score(std::string_view text) const { return sigmoid(logit(text)); }

void NgramClassifier::write(std::ostream& os) const {
  binio::put_str(os, positive_label_);
  binio::put_u32(os, hash_bits_);
  binio::put_f64(os, bias_);
  binio::put_u64(os, weights_.size());
  for (const auto& [j, v] : weights_) {
    binio::put_u32(os, j);
    binio::put_f64(os, v);
  }
}

NgramClassifier NgramClassifier::read(std::istream& is) {
  NgramClassifier m;
  m.positive_label_ = binio::get_str(is);
  m.hash_bits_ = binio::get_u32(is);
  if (m.hash_bits_ < 4 || m.hash_bits_ > 28) throw Error("classifier file has invalid hash width");
  m.bias_ = binio::get_f64(is);
  const auto n = binio::get_u64(is);
  if (n > (std::uint64_t{1} << m.hash_bits_)) throw Error("classifier file has too many weights");
  m.weights_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto j = binio::get_u32(is);
    const auto v = binio::get_f64(is);
    if (!m.weights_.empty() && j <= m.weights_.back().first) throw Error("classifier weights are not sorted");
    m.weights_.emplace_back(j, v);
  }
  return m;
}

}  // namespace curate
