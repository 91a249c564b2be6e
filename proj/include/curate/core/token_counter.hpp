#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curate/core/document.hpp"

namespace curate {

/// Splits on ASCII whitespace; empty pieces are never produced.
std::vector<std::string_view> split_whitespace(std::string_view text);

class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::size_t count(std::string_view text) const = 0;
  virtual std::string name() const = 0;
};

// Counts maximal runs of non-whitespace bytes.
class WhitespaceCounter final : public TokenCounter {
 public:
  std::size_t count(std::string_view text) const override;
  std::string name() const override { return "whitespace"; }
};

// Byte-level BPE over whitespace-delimited words. Merges never cross word
// boundaries, so counts stay additive over whitespace-joined pieces.
class BpeCounter final : public TokenCounter {
 public:
  using Merge = std::pair<std::string, std::string>;

  explicit BpeCounter(std::vector<Merge> merges);

  /// Learns up to `num_merges` merges from the corpus; the most frequent
  /// adjacent pair wins, ties go to the lexicographically smallest pair.
  static BpeCounter train(std::span<const std::string> corpus, std::size_t num_merges);
  static BpeCounter load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::vector<std::string> encode_word(std::string_view word) const;
  std::size_t count(std::string_view text) const override;
  std::string name() const override { return "bpe" + std::to_string(merges_.size()); }
  const std::vector<Merge>& merges() const { return merges_; }

 private:
  std::vector<Merge> merges_;
  std::map<Merge, std::size_t> rank_;
};

/// "whitespace" or "bpe:<merges file>". Throws ConfigError otherwise.
std::unique_ptr<TokenCounter> make_token_counter(std::string_view spec);

std::size_t count_tokens(const TokenCounter& counter, const Document& doc);

}  // namespace curate
