#include "curate/core/token_counter.hpp"

#include <fstream>
#include <limits>
#include <unordered_map>

#include "curate/core/error.hpp"

namespace curate {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string> split_bytes(std::string_view word) {
  std::vector<std::string> pieces;
  pieces.reserve(word.size());
  for (char c : word) pieces.emplace_back(1, c);
  return pieces;
}

constexpr std::string_view kBpeMagic = "BPE1";

}  // namespace

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::size_t WhitespaceCounter::count(std::string_view text) const {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

BpeCounter::BpeCounter(std::vector<Merge> merges) : merges_(std::move(merges)) {
  for (std::size_t i = 0; i < merges_.size(); ++i) rank_.emplace(merges_[i], i);
}

BpeCounter BpeCounter::train(std::span<const std::string> corpus, std::size_t num_merges) {
  std::map<std::string, std::size_t> word_freq;
  for (const auto& text : corpus) {
    for (auto w : split_whitespace(text)) ++word_freq[std::string(w)];
  }
  std::vector<std::pair<std::vector<std::string>, std::size_t>> words;
  words.reserve(word_freq.size());
  for (const auto& [w, f] : word_freq) words.emplace_back(split_bytes(w), f);

  std::vector<Merge> merges;
  for (std::size_t m = 0; m < num_merges; ++m) {
    std::map<Merge, std::size_t> pair_freq;
    for (const auto& [pieces, f] : words) {
      for (std::size_t i = 0; i + 1 < pieces.size(); ++i) pair_freq[{pieces[i], pieces[i + 1]}] += f;
    }
    const Merge* best = nullptr;
    std::size_t best_freq = 0;
    for (const auto& [pair, f] : pair_freq) {
      if (f > best_freq) {
        best = &pair;
        best_freq = f;
      }
    }
    if (!best || best_freq < 2) break;
    const Merge chosen = *best;
    for (auto& [pieces, f] : words) {
      std::vector<std::string> merged;
      merged.reserve(pieces.size());
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i + 1 < pieces.size() && pieces[i] == chosen.first && pieces[i + 1] == chosen.second) {
          merged.push_back(pieces[i] + pieces[i + 1]);
          ++i;
        } else {
          merged.push_back(pieces[i]);
        }
      }
      pieces = std::move(merged);
    }
    merges.push_back(chosen);
  }
  return BpeCounter(std::move(merges));
}

BpeCounter BpeCounter::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open BPE merges file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kBpeMagic) {
    throw Error("not a BPE merges file (bad magic): " + path.string());
  }
  std::vector<Merge> merges;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 == line.size()) {
      throw Error("malformed merge line in " + path.string() + ": " + line);
    }
    merges.emplace_back(line.substr(0, space), line.substr(space + 1));
  }
  return BpeCounter(std::move(merges));
}

void BpeCounter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write BPE merges file: " + path.string());
  out << kBpeMagic << '\n';
  for (const auto& [a, b] : merges_) out << a << ' ' << b << '\n';
}

std::vector<std::string> BpeCounter::encode_word(std::string_view word) const {
  auto pieces = split_bytes(word);
  for (;;) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
      auto it = rank_.find({pieces[i], pieces[i + 1]});
      if (it != rank_.end() && it->second < best_rank) best_rank = it->second;
    }
    if (best_rank == std::numeric_limits<std::size_t>::max()) break;
    const Merge& m = merges_[best_rank];
    std::vector<std::string> merged;
    merged.reserve(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (i + 1 < pieces.size() && pieces[i] == m.first && pieces[i + 1] == m.second) {
        merged.push_back(pieces[i] + pieces[i + 1]);
        ++i;
      } else {
        merged.push_back(pieces[i]);
      }
    }
    pieces = std::move(merged);
  }
  return pieces;
}

std::size_t BpeCounter::count(std::string_view text) const {
  std::size_t n = 0;
  for (auto w : split_whitespace(text)) n += encode_word(w).size();
  return n;
}

std::unique_ptr<TokenCounter> make_token_counter(std::string_view spec) {
  if (spec.empty() || spec == "whitespace") return std::make_unique<WhitespaceCounter>();
  constexpr std::string_view bpe_prefix = "bpe:";
  if (spec.rfind(bpe_prefix, 0) == 0) {
    return std::make_unique<BpeCounter>(BpeCounter::load(std::string(spec.substr(bpe_prefix.size()))));
  }
  throw ConfigError("unknown token counter '" + std::string(spec) + "'");
}

std::size_t count_tokens(const TokenCounter& counter, const Document& doc) {
  return counter.count(doc.text);
}

}  // namespace curate
