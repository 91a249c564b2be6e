#include "curate/dedup/fuzzy_dedup.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include "curate/core/error.hpp"
#include "curate/core/hashing.hpp"
#include "curate/core/parallel.hpp"

namespace curate {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::size_t LshIndex::SliceHash::operator()(const std::vector<std::uint64_t>& v) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto x : v) h = mix64(h ^ x);
  return static_cast<std::size_t>(h);
}

LshIndex::LshIndex(std::size_t bands, std::size_t rows) : bands_(bands), rows_(rows), tables_(bands) {
  if (bands == 0 || rows == 0) throw Error("LSH bands and rows must be positive");
}

void LshIndex::insert(std::size_t item, const MinHashSignature& sig) {
  if (sig.k() != bands_ * rows_) throw Error("signature size does not equal bands * rows");
  for (std::size_t b = 0; b < bands_; ++b) {
    std::vector<std::uint64_t> slice(sig.hashes.begin() + static_cast<std::ptrdiff_t>(b * rows_),
                                     sig.hashes.begin() + static_cast<std::ptrdiff_t>((b + 1) * rows_));
    tables_[b][std::move(slice)].push_back(item);
  }
}

std::vector<std::pair<std::size_t, std::size_t>> LshIndex::candidate_pairs() const {
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& table : tables_) {
    for (const auto& [slice, items] : table) {
      for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
          pairs.emplace(std::min(items[i], items[j]), std::max(items[i], items[j]));
        }
      }
    }
  }
  return {pairs.begin(), pairs.end()};
}

Json DuplicateCluster::to_json() const {
  return Json{{"representative", representative}, {"members", members}};
}

void FuzzyDedupParams::validate() const {
  if (bands * rows != k) throw ConfigError("fuzzy dedup: bands * rows must equal k");
  if (shingle_size == 0) throw ConfigError("fuzzy dedup: shingle_size must be positive");
  if (threshold < 0.0 || threshold > 1.0) throw ConfigError("fuzzy dedup: threshold must be in [0,1]");
}

FuzzyDedupResult fuzzy_dedup(std::vector<Document> docs, const FuzzyDedupParams& params,
                             const TokenCounter& counter) {
  params.validate();
  const std::size_t n = docs.size();
  std::vector<std::optional<MinHashSignature>> sigs(n);
  std::vector<std::uint64_t> tokens(n);
  parallel_for(n, params.workers, [&](std::size_t i) {
    tokens[i] = counter.count(docs[i].text);
    try {
      sigs[i] = minhash(docs[i].text, params.shingle_size, params.k, params.seed);
    } catch (const Error&) {
      // Below shingle width: never a duplicate candidate.
    }
  });

  LshIndex index(params.bands, params.rows);
  std::size_t short_docs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sigs[i]) index.insert(i, *sigs[i]);
    else ++short_docs;
  }
  UnionFind uf(n);
  std::size_t candidates = 0;
  for (const auto& [a, b] : index.candidate_pairs()) {
    ++candidates;
    if (estimate_jaccard(*sigs[a], *sigs[b]) >= params.threshold) uf.unite(a, b);
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[uf.find(i)].push_back(i);

  std::vector<bool> keep(n, true);
  FuzzyDedupResult result;
  for (const auto& [root, members] : groups) {
    if (members.size() < 2) continue;
    std::size_t rep = members.front();
    for (std::size_t m : members) {
      if (docs[m].id < docs[rep].id) rep = m;
    }
    DuplicateCluster cluster;
    cluster.representative = docs[rep].id;
    for (std::size_t m : members) {
      cluster.members.push_back(docs[m].id);
      if (m != rep) keep[m] = false;
    }
    std::sort(cluster.members.begin(), cluster.members.end());
    result.clusters.push_back(std::move(cluster));
  }
  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const auto& a, const auto& b) { return a.representative < b.representative; });

  StageReport& report = result.report;
  report.stage = "dedup_fuzzy";
  report.docs_in = n;
  RuleStats removed;
  for (std::size_t i = 0; i < n; ++i) {
    report.tokens_in += tokens[i];
    if (keep[i]) {
      report.tokens_out += tokens[i];
      result.kept.push_back(std::move(docs[i]));
    } else {
      ++removed.docs_dropped;
      removed.tokens_removed += tokens[i];
      result.removed_ids.push_back(docs[i].id);
    }
  }
  report.docs_out = result.kept.size();
  report.rules["fuzzy_duplicate"] = removed;
  report.details["clusters"] = result.clusters.size();
  report.details["candidate_pairs"] = candidates;
  report.details["below_shingle_width"] = short_docs;
  return result;
}

}  // namespace curate
