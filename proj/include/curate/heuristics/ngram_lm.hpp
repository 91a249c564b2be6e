#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/stage_report.hpp"
#include "curate/heuristics/rules.hpp"

namespace curate {

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";

// Raw n-gram counts of orders 1..n over whitespace tokens. Each text is one
// sequence "<s> w1 .. wT </s>"; <s> is context only and never counted as a
// unigram. Shards merge by plain addition.
class NgramCounts {
 public:
  using Gram = std::vector<std::uint32_t>;

  explicit NgramCounts(std::size_t order);

  void add_text(std::string_view text);
  void merge(const NgramCounts& other);

  std::size_t order() const { return order_; }
  std::uint64_t total_tokens() const { return total_tokens_; }
  const std::vector<std::string>& vocab() const { return words_; }
  /// Counts of grams of length k (1-based), keyed by word ids.
  const std::map<Gram, std::uint64_t>& grams(std::size_t k) const { return counts_.at(k - 1); }
  std::uint32_t id_of(std::string_view word) const;  // kUnk id when unseen

  friend bool operator==(const NgramCounts&, const NgramCounts&);

 private:
  friend class NgramLm;
  std::uint32_t intern(std::string_view word);

  std::size_t order_;
  std::uint64_t total_tokens_ = 0;
  std::vector<std::string> words_;  // ids 0,1,2 are <s>, </s>, <unk>
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::map<Gram, std::uint64_t>> counts_;
};

// Interpolated Kneser-Ney with one discount per order estimated from
// counts-of-counts of the adjusted counts. The predicted vocabulary is the
// training words plus </s> and <unk>; the base distribution is uniform.
class NgramLm {
 public:
  explicit NgramLm(NgramCounts counts);

  /// Every text is a sequence; total tokens must reach `order`.
  static NgramLm train(std::span<const std::string> corpus, std::size_t order);
  /// A model with no observations: P(w | h) = 1 / |V| for every w.
  static NgramLm uniform(std::span<const std::string> words, std::size_t order = 1);

  static NgramLm load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t order() const { return counts_.order(); }
  /// Size of the predicted vocabulary (words + </s> + <unk>).
  std::size_t vocab_size() const { return counts_.vocab().size() - 1; }
  /// Predictable symbols: every word, </s> and <unk>.
  std::vector<std::string> predicted_vocab() const;
  double discount(std::size_t k) const { return discounts_.at(k - 1); }
  const NgramCounts& counts() const { return counts_; }

  /// P(word | history); only the last order-1 history tokens matter.
  /// Unknown words are scored as <unk>.
  double prob(std::string_view word, std::span<const std::string> history) const;
  /// Natural-log probabilities of every prediction in "<s> text </s>".
  std::vector<double> sequence_log_probs(std::string_view text) const;
  /// exp of the mean negative log probability over the tokens plus </s>.
  /// Throws on empty text.
  double perplexity(std::string_view text) const;

 private:
  using Gram = NgramCounts::Gram;
  struct Context {
    double total = 0;        // sum of adjusted counts over continuations
    std::uint64_t types = 0;  // continuations with nonzero adjusted count
  };
  struct GramHash {
    std::size_t operator()(const Gram& g) const noexcept;
  };

  double prob_ids(std::uint32_t word, const std::uint32_t* hist, std::size_t hist_len) const;

  NgramCounts counts_;
  std::vector<double> discounts_;
  std::vector<std::unordered_map<Gram, double, GramHash>> adjusted_;
  std::vector<std::unordered_map<Gram, Context, GramHash>> contexts_;
};

/// Drop iff perplexity > threshold; threshold must be positive.
bool perplexity_keep(const NgramLm& lm, std::string_view text, double threshold);

/// Nearest-rank quantile q in (0, 1] of `values`.
double nearest_rank_quantile(std::vector<double> values, double q);

struct CalibratedLm {
  NgramLm lm;
  double threshold;
  std::size_t holdout_docs;
};

/// Every `holdout_every`-th text (index % holdout_every == holdout_every - 1)
/// is held out; the model is trained on the rest and the threshold is the
/// `quantile` of held-out perplexities.
CalibratedLm train_calibrated_lm(std::span<const std::string> corpus, std::size_t order,
                                 std::size_t holdout_every = 10, double quantile = 0.9);

FilterResult perplexity_filter_documents(std::vector<Document> docs, const NgramLm& lm, double threshold,
                                         const TokenCounter& counter, std::size_t workers = 1);

}  // namespace curate
