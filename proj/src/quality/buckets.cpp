#include "curate/quality/buckets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "curate/core/error.hpp"

namespace curate {

std::vector<double> compute_thresholds(std::span<const double> scores) {
  if (scores.size() < static_cast<std::size_t>(kBucketCount))
    throw Error("bucket boundaries need at least 20 scores, got " + std::to_string(scores.size()));
  std::vector<double> sorted(scores.begin(), scores.end());
  if (!std::all_of(sorted.begin(), sorted.end(), [](double x) { return std::isfinite(x); }))
    throw Error("scores must be finite");
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<double> t(kThresholdCount);
  for (std::size_t i = 1; i <= kThresholdCount; ++i) {
    const std::size_t rank = (i * n + kBucketCount - 1) / kBucketCount;
    t[i - 1] = sorted[rank - 1];
  }
  return t;
}

int bucket_of(std::span<const double> thresholds, double score) {
  if (thresholds.size() != kThresholdCount) throw Error("expected 19 bucket thresholds");
  if (std::isnan(score)) throw Error("cannot bucket a NaN score");
  return static_cast<int>(std::upper_bound(thresholds.begin(), thresholds.end(), score) - thresholds.begin());
}

int ensemble(std::span<const int> buckets) {
  if (buckets.empty()) throw Error("ensemble of zero scorers");
  return *std::max_element(buckets.begin(), buckets.end());
}

BucketBoundaries BucketBoundaries::fit(const std::map<std::string, std::vector<double>>& scores) {
  BucketBoundaries b;
  for (const auto& [name, s] : scores) {
    try {
      b.thresholds[name] = compute_thresholds(s);
    } catch (const Error& e) {
      throw Error("scorer " + name + ": " + e.what());
    }
  }
  return b;
}

int BucketBoundaries::bucket(const std::string& scorer, double score) const {
  const auto it = thresholds.find(scorer);
  if (it == thresholds.end()) throw Error("no bucket boundaries for scorer " + scorer);
  return bucket_of(it->second, score);
}

Json BucketBoundaries::to_json() const {
  Json j = Json::object();
  for (const auto& [name, t] : thresholds) j[name] = t;
  return j;
}

BucketBoundaries BucketBoundaries::from_json(const Json& j) {
  if (!j.is_object()) throw Error("bucket boundaries must be a JSON object");
  BucketBoundaries b;
  for (const auto& [name, v] : j.items()) {
    if (!v.is_array() || v.size() != kThresholdCount)
      throw Error("scorer " + name + ": expected an array of 19 thresholds");
    std::vector<double> t;
    for (const auto& x : v) {
      if (!x.is_number()) throw Error("scorer " + name + ": thresholds must be numbers");
      t.push_back(x.get<double>());
    }
    if (!std::is_sorted(t.begin(), t.end())) throw Error("scorer " + name + ": thresholds must be non-decreasing");
    b.thresholds[name] = std::move(t);
  }
  if (b.thresholds.empty()) throw Error("bucket boundaries list no scorers");
  return b;
}

BucketBoundaries BucketBoundaries::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  try {
    return from_json(Json::parse(is));
  } catch (const Json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void BucketBoundaries::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << to_json().dump(2) << '\n';
}

void assign_buckets(Document& doc, const BucketBoundaries& boundaries, std::span<const std::string> ensemble_members) {
  std::vector<int> per;
  doc.buckets.clear();
  for (const auto& [name, t] : boundaries.thresholds) {
    if (!ensemble_members.empty() &&
        std::find(ensemble_members.begin(), ensemble_members.end(), name) == ensemble_members.end())
      continue;
    const auto it = doc.scores.find(name);
    if (it == doc.scores.end()) throw Error("document " + doc.id + " has no score for " + name);
    const int b = bucket_of(t, it->second);
    doc.buckets[name] = b;
    per.push_back(b);
  }
  doc.final_bucket = ensemble(per);
  doc.label = bucket_to_label(*doc.final_bucket);
}

BucketHistogram bucket_histogram(std::span<const int> buckets) {
  BucketHistogram h;
  for (int b : buckets) {
    if (b < 0 || b >= kBucketCount) throw Error("bucket out of range");
    ++h.counts[static_cast<std::size_t>(b)];
  }
  if (!buckets.empty()) {
    for (auto c : h.counts) {
      const double share = static_cast<double>(c) / static_cast<double>(buckets.size());
      h.max_deviation = std::max(h.max_deviation, std::abs(share - 1.0 / kBucketCount));
    }
  }
  return h;
}

Json BucketHistogram::to_json() const {
  return Json{{"counts", counts}, {"max_deviation_from_5pct", max_deviation}};
}

}  // namespace curate
