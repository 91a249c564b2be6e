#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace curate {

inline constexpr std::size_t kDefaultShingleSize = 13;
inline constexpr std::size_t kDefaultSignatureSize = 128;
inline constexpr std::uint64_t kDefaultMinHashSeed = 0x6d696e68617368ULL;

struct MinHashSignature {
  std::vector<std::uint64_t> hashes;
  std::uint64_t seed = 0;

  std::size_t k() const { return hashes.size(); }
  friend bool operator==(const MinHashSignature&, const MinHashSignature&) = default;
};

/// Hashes of every contiguous `width`-word window of `text` (duplicates
/// kept). Throws curate::Error("below shingle width") when the text has
/// fewer than `width` words.
std::vector<std::uint64_t> shingle_hashes(std::string_view text, std::size_t width);

/// Component i of the signature is min over shingles of h_i(shingle), where
/// h_i is a seeded SplitMix64 permutation of the shingle's FNV-1a hash.
MinHashSignature minhash_from_shingles(std::span<const std::uint64_t> shingles, std::size_t k,
                                       std::uint64_t seed);

MinHashSignature minhash(std::string_view text, std::size_t shingle_size = kDefaultShingleSize,
                         std::size_t k = kDefaultSignatureSize, std::uint64_t seed = kDefaultMinHashSeed);

/// Fraction of agreeing components. Throws on mismatched k or seed.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

}  // namespace curate
