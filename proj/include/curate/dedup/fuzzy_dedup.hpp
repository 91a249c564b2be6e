#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/stage_report.hpp"
#include "curate/core/token_counter.hpp"
#include "curate/dedup/minhash.hpp"

namespace curate {

// Banded LSH over MinHash signatures: `bands` tables keyed by the exact
// row slice of each band.
class LshIndex {
 public:
  LshIndex(std::size_t bands, std::size_t rows);

  void insert(std::size_t item, const MinHashSignature& sig);
  /// Every (a, b) with a < b sharing at least one band slice, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> candidate_pairs() const;

  std::size_t bands() const { return bands_; }
  std::size_t rows() const { return rows_; }

 private:
  struct SliceHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const noexcept;
  };
  std::size_t bands_;
  std::size_t rows_;
  std::vector<std::unordered_map<std::vector<std::uint64_t>, std::vector<std::size_t>, SliceHash>> tables_;
};

struct DuplicateCluster {
  std::string representative;
  std::vector<std::string> members;  // sorted, includes the representative

  Json to_json() const;
  friend bool operator==(const DuplicateCluster&, const DuplicateCluster&) = default;
};

struct FuzzyDedupParams {
  std::size_t shingle_size = kDefaultShingleSize;
  std::size_t k = kDefaultSignatureSize;
  std::size_t bands = 16;
  std::size_t rows = 8;
  double threshold = 0.8;
  std::uint64_t seed = kDefaultMinHashSeed;
  std::size_t workers = 1;

  void validate() const;  // bands * rows == k
};

struct FuzzyDedupResult {
  std::vector<Document> kept;              // input order
  std::vector<DuplicateCluster> clusters;  // only clusters of size >= 2, by representative
  std::vector<std::string> removed_ids;    // input order
  StageReport report;
};

/// Candidate pairs from band collisions whose estimated Jaccard reaches the
/// threshold are unioned; each cluster keeps its lexicographically smallest
/// id. Documents shorter than one shingle are kept unconditionally.
FuzzyDedupResult fuzzy_dedup(std::vector<Document> docs, const FuzzyDedupParams& params,
                             const TokenCounter& counter);

}  // namespace curate
