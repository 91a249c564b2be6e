#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curate {

struct LabeledText {
  std::string text;
  std::string label;
};

struct NgramClassifierOptions {
  unsigned hash_bits = 20;
  std::size_t epochs = 5;
  double learning_rate = 0.1;
  std::uint64_t seed = 42;

  void validate() const;
};

// Logistic regression over hashed word unigrams and bigrams. Feature
// vectors are L2-normalised term counts. score() is P(positive class).
class NgramClassifier {
 public:
  using Feature = std::pair<std::uint32_t, double>;

  /// Examples whose label equals `positive_label` are positives; all other
  /// labels are negatives. Needs at least two labels with >= 10 examples each.
  static NgramClassifier train(std::span<const LabeledText> examples, const std::string& positive_label,
                               const NgramClassifierOptions& options = {});

  double score(std::string_view text) const;
  double logit(std::string_view text) const;

  const std::string& positive_label() const { return positive_label_; }
  unsigned hash_bits() const { return hash_bits_; }
  std::size_t nonzero_weights() const { return weights_.size(); }

  void write(std::ostream& os) const;
  static NgramClassifier read(std::istream& is);

  /// Sorted, merged feature vector used by both training and inference.
  static std::vector<Feature> features(std::string_view text, unsigned hash_bits);

 private:
  std::string positive_label_;
  unsigned hash_bits_ = 20;
  double bias_ = 0;
  std::vector<std::pair<std::uint32_t, double>> weights_;  // sorted by index, nonzero only
};

}  // namespace curate
