#include "curate/dedup/minhash.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "curate/core/error.hpp"
#include "curate/core/hashing.hpp"
#include "curate/core/token_counter.hpp"

namespace curate {

std::vector<std::uint64_t> shingle_hashes(std::string_view text, std::size_t width) {
  if (width == 0) throw Error("shingle width must be positive");
  const auto words = split_whitespace(text);
  if (words.size() < width) throw Error("below shingle width");
  std::vector<std::uint64_t> out;
  out.reserve(words.size() - width + 1);
  for (std::size_t i = 0; i + width <= words.size(); ++i) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t k = 0; k < width; ++k) {
      if (k) h = fnv1a64(" ", h);
      h = fnv1a64(words[i + k], h);
    }
    out.push_back(h);
  }
  return out;
}

MinHashSignature minhash_from_shingles(std::span<const std::uint64_t> shingles, std::size_t k,
                                       std::uint64_t seed) {
  if (k == 0) throw Error("signature size must be positive");
  if (shingles.empty()) throw Error("below shingle width");
  MinHashSignature sig;
  sig.seed = seed;
  sig.hashes.assign(k, std::numeric_limits<std::uint64_t>::max());
  std::vector<std::uint64_t> salts(k);
  for (std::size_t i = 0; i < k; ++i) salts[i] = mix64(seed ^ mix64(i + 1));
  for (std::uint64_t s : shingles) {
    for (std::size_t i = 0; i < k; ++i) {
      sig.hashes[i] = std::min(sig.hashes[i], mix64(s ^ salts[i]));
    }
  }
  return sig;
}

MinHashSignature minhash(std::string_view text, std::size_t shingle_size, std::size_t k, std::uint64_t seed) {
  const auto shingles = shingle_hashes(text, shingle_size);
  return minhash_from_shingles(shingles, k, seed);
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.k() != b.k()) throw Error("signature size mismatch");
  if (a.seed != b.seed) throw Error("signature seed mismatch");
  if (a.k() == 0) throw Error("empty signature");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.k(); ++i) agree += a.hashes[i] == b.hashes[i];
  return static_cast<double>(agree) / static_cast<double>(a.k());
}

}  // namespace curate
