#include "curate/dedup/exact_dedup.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "curate/core/error.hpp"
#include "curate/core/hashing.hpp"
#include "curate/core/parallel.hpp"

namespace curate {

std::size_t shard_of(const Document& doc, std::size_t shard_count) {
  if (shard_count == 0) throw Error("shard_count must be >= 1");
  std::uint64_t h = fnv1a64(doc.snapshot);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(doc.id, h);
  return static_cast<std::size_t>(mix64(h) % shard_count);
}

std::vector<std::size_t> shard_by_snapshot(std::span<const Document> docs, std::size_t shard_count) {
  std::vector<std::size_t> out(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) out[i] = shard_of(docs[i], shard_count);
  return out;
}

std::vector<std::uint32_t> suffix_array(std::span<const std::uint32_t> s) {
  const std::size_t n = s.size();
  std::vector<std::uint32_t> sa(n), rank(n), tmp(n);
  std::iota(sa.begin(), sa.end(), 0u);
  for (std::size_t i = 0; i < n; ++i) rank[i] = s[i];
  for (std::size_t len = 1;; len <<= 1) {
    auto key = [&](std::uint32_t i) {
      const std::uint64_t second = i + len < n ? static_cast<std::uint64_t>(rank[i + len]) + 1 : 0;
      return (static_cast<std::uint64_t>(rank[i]) << 32) | second;
    };
    std::sort(sa.begin(), sa.end(), [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });
    if (n == 0) break;
    tmp[sa[0]] = 0;
    for (std::size_t i = 1; i < n; ++i) tmp[sa[i]] = tmp[sa[i - 1]] + (key(sa[i - 1]) < key(sa[i]) ? 1 : 0);
    rank.swap(tmp);
    if (rank[sa[n - 1]] == n - 1) break;
    if (len >= n) break;
  }
  return sa;
}

std::vector<std::uint32_t> lcp_array(std::span<const std::uint32_t> s, std::span<const std::uint32_t> sa) {
  const std::size_t n = s.size();
  std::vector<std::uint32_t> rank(n), lcp(n, 0);
  for (std::size_t i = 0; i < n; ++i) rank[sa[i]] = static_cast<std::uint32_t>(i);
  std::size_t h = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rank[i] == 0) {
      h = 0;
      continue;
    }
    const std::size_t j = sa[rank[i] - 1];
    while (i + h < n && j + h < n && s[i + h] == s[j + h]) ++h;
    lcp[rank[i]] = static_cast<std::uint32_t>(h);
    if (h > 0) --h;
  }
  return lcp;
}

std::vector<std::vector<std::uint32_t>> tokenize_for_dedup(const std::vector<std::string_view>& texts) {
  std::unordered_map<std::string_view, std::uint32_t> vocab;
  std::vector<std::vector<std::uint32_t>> out(texts.size());
  for (std::size_t d = 0; d < texts.size(); ++d) {
    for (auto w : split_whitespace(texts[d])) {
      auto [it, inserted] = vocab.emplace(w, static_cast<std::uint32_t>(vocab.size()));
      out[d].push_back(it->second);
    }
  }
  return out;
}

std::vector<std::vector<bool>> duplicate_token_mask(const std::vector<std::vector<std::uint32_t>>& docs,
                                                    std::size_t min_match) {
  if (min_match < 2) throw Error("min_match_tokens must be >= 2");
  std::vector<std::vector<bool>> mask(docs.size());
  std::uint32_t max_token = 0;
  std::size_t total = 0;
  for (const auto& d : docs) {
    for (auto t : d) max_token = std::max(max_token, t);
    total += d.size() + 1;
  }
  // Concatenate with one unique sentinel after each document.
  std::vector<std::uint32_t> concat;
  std::vector<std::uint32_t> owner;   // document of each position
  std::vector<std::uint32_t> offset;  // position inside that document
  concat.reserve(total);
  owner.reserve(total);
  offset.reserve(total);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    mask[d].assign(docs[d].size(), false);
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      concat.push_back(docs[d][i]);
      owner.push_back(static_cast<std::uint32_t>(d));
      offset.push_back(static_cast<std::uint32_t>(i));
    }
    concat.push_back(max_token + 1 + static_cast<std::uint32_t>(d));
    owner.push_back(static_cast<std::uint32_t>(d));
    offset.push_back(static_cast<std::uint32_t>(docs[d].size()));
  }
  const std::size_t n = concat.size();
  if (n == 0) return mask;
  const auto sa = suffix_array(concat);
  const auto lcp = lcp_array(concat, sa);

  // Suffixes sharing >= min_match leading tokens form contiguous runs of
  // the suffix array. Every window in a run except the earliest repeats.
  std::vector<int> cover(n + 1, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && lcp[j] >= min_match) ++j;
    if (j - i >= 2) {
      std::uint32_t first = sa[i];
      for (std::size_t k = i; k < j; ++k) first = std::min(first, sa[k]);
      for (std::size_t k = i; k < j; ++k) {
        if (sa[k] == first) continue;
        cover[sa[k]] += 1;
        cover[sa[k] + min_match] -= 1;
      }
    }
    i = j;
  }
  int running = 0;
  for (std::size_t p = 0; p < n; ++p) {
    running += cover[p];
    if (running > 0) {
      const std::uint32_t d = owner[p];
      if (offset[p] < docs[d].size()) mask[d][offset[p]] = true;
    }
  }
  return mask;
}

std::string remove_marked_tokens(std::string_view text, const std::vector<bool>& mask) {
  struct Span {
    std::size_t begin, end;
  };
  std::vector<Span> tokens;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  for (std::size_t i = 0; i < text.size();) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t b = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > b) tokens.push_back({b, i});
  }
  if (tokens.size() != mask.size()) throw Error("token mask does not match text");
  std::vector<bool> drop_byte(text.size(), false);
  std::size_t t = 0;
  while (t < tokens.size()) {
    if (!mask[t]) {
      ++t;
      continue;
    }
    std::size_t u = t;
    while (u < tokens.size() && mask[u]) ++u;
    std::size_t from, to;
    if (u < tokens.size()) {
      from = tokens[t].begin;
      to = tokens[u].begin;
    } else {
      from = t > 0 ? tokens[t - 1].end : tokens[t].begin;
      to = text.size();
    }
    for (std::size_t b = from; b < to; ++b) drop_byte[b] = true;
    t = u;
  }
  std::string out;
  out.reserve(text.size());
  for (std::size_t b = 0; b < text.size(); ++b) {
    if (!drop_byte[b]) out.push_back(text[b]);
  }
  return out;
}

void ExactDedupParams::validate() const {
  if (min_match_tokens < 2) throw ConfigError("exact dedup: min_match_tokens must be >= 2");
  if (shard_count < 1) throw ConfigError("exact dedup: shard_count must be >= 1");
}

ExactDedupResult exact_substring_dedup(std::vector<Document> docs, const ExactDedupParams& params,
                                       const TokenCounter& counter) {
  params.validate();
  const auto shards = shard_by_snapshot(docs, params.shard_count);
  std::vector<std::vector<std::size_t>> members(params.shard_count);
  for (std::size_t i = 0; i < docs.size(); ++i) members[shards[i]].push_back(i);

  std::vector<std::string> rewritten(docs.size());
  std::vector<std::size_t> spans(params.shard_count, 0);
  parallel_for(params.shard_count, params.workers, [&](std::size_t s) {
    std::vector<std::string_view> texts;
    for (auto i : members[s]) texts.push_back(docs[i].text);
    const auto tokens = tokenize_for_dedup(texts);
    const auto mask = duplicate_token_mask(tokens, params.min_match_tokens);
    for (std::size_t k = 0; k < members[s].size(); ++k) {
      const auto& m = mask[k];
      if (std::find(m.begin(), m.end(), true) == m.end()) {
        rewritten[members[s][k]] = docs[members[s][k]].text;
        continue;
      }
      for (std::size_t t = 0; t < m.size(); ++t) spans[s] += m[t] && (t == 0 || !m[t - 1]);
      rewritten[members[s][k]] = remove_marked_tokens(texts[k], m);
    }
  });

  ExactDedupResult result;
  StageReport& report = result.report;
  report.stage = "dedup_exact";
  report.docs_in = docs.size();
  RuleStats removed;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::uint64_t before = counter.count(docs[i].text);
    const std::uint64_t after = counter.count(rewritten[i]);
    report.tokens_in += before;
    const bool empty = split_whitespace(rewritten[i]).empty();
    if (empty) {
      ++removed.docs_dropped;
      removed.tokens_removed += before;
      result.dropped_ids.push_back(docs[i].id);
      continue;
    }
    removed.tokens_removed += before - after;
    report.tokens_out += after;
    docs[i].text = std::move(rewritten[i]);
    result.docs.push_back(std::move(docs[i]));
  }
  report.docs_out = result.docs.size();
  report.rules["exact_substring"] = removed;
  std::size_t total_spans = 0;
  for (auto s : spans) total_spans += s;
  report.details["spans_removed"] = total_spans;
  report.details["shard_count"] = params.shard_count;
  report.details["min_match_tokens"] = params.min_match_tokens;
  return result;
}

}  // namespace curate
