#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "curate/core/document.hpp"

namespace curate {

inline constexpr std::size_t kThresholdCount = kBucketCount - 1;

/// threshold_i = sorted[ceil(i * n / 20) - 1] for i = 1..19 (nearest rank).
/// Throws with fewer than 20 scores or any non-finite score.
std::vector<double> compute_thresholds(std::span<const double> scores);
/// Number of thresholds <= score, in 0..19.
int bucket_of(std::span<const double> thresholds, double score);
/// Max of the per-scorer buckets; throws on an empty input.
int ensemble(std::span<const int> buckets);

// Frozen per-scorer thresholds, serialised as {"scorer": [19 numbers]}.
struct BucketBoundaries {
  std::map<std::string, std::vector<double>> thresholds;

  static BucketBoundaries fit(const std::map<std::string, std::vector<double>>& scores);
  int bucket(const std::string& scorer, double score) const;

  Json to_json() const;
  static BucketBoundaries from_json(const Json& j);
  static BucketBoundaries load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// Buckets every ensemble member (all scorers in `boundaries` when
/// `ensemble_members` is empty), then final_bucket = max and
/// label = bucket_to_label(final).
void assign_buckets(Document& doc, const BucketBoundaries& boundaries,
                    std::span<const std::string> ensemble_members = {});

/// Per-bucket document counts and shares for one scorer, plus the largest
/// absolute deviation from the ideal 5%.
struct BucketHistogram {
  std::vector<std::size_t> counts = std::vector<std::size_t>(kBucketCount, 0);
  double max_deviation = 0;
  Json to_json() const;
};
BucketHistogram bucket_histogram(std::span<const int> buckets);

}  // namespace curate
