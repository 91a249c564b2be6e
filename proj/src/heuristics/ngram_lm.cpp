#include "curate/heuristics/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "curate/core/binary_io.hpp"
#include "curate/core/error.hpp"
#include "curate/core/hashing.hpp"
#include "curate/core/parallel.hpp"
#include "curate/core/token_counter.hpp"

namespace curate {

namespace {

constexpr std::uint32_t kBosId = 0;
constexpr std::uint32_t kEosId = 1;
constexpr std::uint32_t kUnkId = 2;
constexpr std::string_view kMagic = "NGLM1";
constexpr std::uint32_t kFormatVersion = 1;

bool is_reserved(std::string_view w) { return w == kBos || w == kEos || w == kUnk; }

}  // namespace

NgramCounts::NgramCounts(std::size_t order) : order_(order), counts_(order) {
  if (order < 1 || order > 5) throw Error("language model order must be in [1, 5]");
  for (auto w : {kBos, kEos, kUnk}) intern(w);
}

std::uint32_t NgramCounts::intern(std::string_view word) {
  auto [it, inserted] = ids_.emplace(std::string(word), static_cast<std::uint32_t>(words_.size()));
  if (inserted) words_.emplace_back(word);
  return it->second;
}

std::uint32_t NgramCounts::id_of(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnkId : it->second;
}

void NgramCounts::add_text(std::string_view text) {
  std::vector<std::uint32_t> seq{kBosId};
  for (auto w : split_whitespace(text)) seq.push_back(is_reserved(w) ? kUnkId : intern(w));
  total_tokens_ += seq.size() - 1;
  seq.push_back(kEosId);
  for (std::size_t i = 1; i < seq.size(); ++i) {
    for (std::size_t k = 1; k <= order_ && k <= i + 1; ++k) {
      Gram g(seq.begin() + static_cast<std::ptrdiff_t>(i + 1 - k), seq.begin() + static_cast<std::ptrdiff_t>(i + 1));
      ++counts_[k - 1][std::move(g)];
    }
  }
}

void NgramCounts::merge(const NgramCounts& other) {
  if (other.order_ != order_) throw Error("cannot merge counts of different orders");
  std::vector<std::uint32_t> remap(other.words_.size());
  for (std::size_t i = 0; i < other.words_.size(); ++i) remap[i] = intern(other.words_[i]);
  for (std::size_t k = 0; k < order_; ++k) {
    for (const auto& [g, c] : other.counts_[k]) {
      Gram mapped(g.size());
      for (std::size_t j = 0; j < g.size(); ++j) mapped[j] = remap[g[j]];
      counts_[k][std::move(mapped)] += c;
    }
  }
  total_tokens_ += other.total_tokens_;
}

bool operator==(const NgramCounts& a, const NgramCounts& b) {
  if (a.order_ != b.order_ || a.total_tokens_ != b.total_tokens_) return false;
  auto as_strings = [](const NgramCounts& c, std::size_t k) {
    std::map<std::vector<std::string>, std::uint64_t> out;
    for (const auto& [g, n] : c.counts_[k]) {
      std::vector<std::string> words;
      for (auto id : g) words.push_back(c.words_[id]);
      out[std::move(words)] = n;
    }
    return out;
  };
  for (std::size_t k = 0; k < a.order_; ++k) {
    if (as_strings(a, k) != as_strings(b, k)) return false;
  }
  return true;
}

std::size_t NgramLm::GramHash::operator()(const Gram& g) const noexcept {
  std::uint64_t h = g.size();
  for (auto x : g) h = mix64(h ^ x);
  return static_cast<std::size_t>(h);
}

NgramLm::NgramLm(NgramCounts counts) : counts_(std::move(counts)) {
  const std::size_t n = counts_.order();
  adjusted_.resize(n);
  contexts_.resize(n);
  discounts_.assign(n, 0.5);
  for (std::size_t k = n; k >= 1; --k) {
    auto& adj = adjusted_[k - 1];
    for (const auto& [g, c] : counts_.grams(k)) {
      if (k == n || g.front() == kBosId) adj[g] = static_cast<double>(c);
    }
    if (k < n) {
      for (const auto& [g, c] : counts_.grams(k + 1)) {
        adj[Gram(g.begin() + 1, g.end())] += 1.0;
      }
    }
    std::uint64_t n1 = 0, n2 = 0;
    for (const auto& [g, a] : adj) {
      n1 += a == 1.0;
      n2 += a == 2.0;
    }
    if (n1 > 0) discounts_[k - 1] = static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2);
    auto& ctx = contexts_[k - 1];
    for (const auto& [g, a] : adj) {
      auto& c = ctx[Gram(g.begin(), g.end() - 1)];
      c.total += a;
      c.types += a > 0 ? 1 : 0;
    }
  }
}

NgramLm NgramLm::train(std::span<const std::string> corpus, std::size_t order) {
  NgramCounts counts(order);
  for (const auto& text : corpus) counts.add_text(text);
  if (counts.total_tokens() < order) throw Error("training corpus has fewer tokens than the model order");
  return NgramLm(std::move(counts));
}

NgramLm NgramLm::uniform(std::span<const std::string> words, std::size_t order) {
  NgramCounts counts(order);
  for (const auto& w : words) {
    if (!is_reserved(w)) counts.intern(w);
  }
  return NgramLm(std::move(counts));
}

std::vector<std::string> NgramLm::predicted_vocab() const {
  const auto& v = counts_.vocab();
  return std::vector<std::string>(v.begin() + 1, v.end());
}

double NgramLm::prob_ids(std::uint32_t word, const std::uint32_t* hist, std::size_t hist_len) const {
  const std::size_t n = order();
  const std::size_t top = std::min(n, hist_len + 1);
  double p = 1.0 / static_cast<double>(vocab_size());
  Gram key;
  for (std::size_t k = 1; k <= top; ++k) {
    key.assign(hist + (hist_len - (k - 1)), hist + hist_len);
    const auto cit = contexts_[k - 1].find(key);
    if (cit == contexts_[k - 1].end() || cit->second.total <= 0) continue;
    key.push_back(word);
    const auto ait = adjusted_[k - 1].find(key);
    const double a = ait == adjusted_[k - 1].end() ? 0.0 : ait->second;
    const double d = discounts_[k - 1];
    const double total = cit->second.total;
    p = std::max(a - d, 0.0) / total + d * static_cast<double>(cit->second.types) / total * p;
  }
  return p;
}

double NgramLm::prob(std::string_view word, std::span<const std::string> history) const {
  if (word == kBos) throw Error("<s> is never predicted");
  std::vector<std::uint32_t> hist;
  for (const auto& h : history) hist.push_back(counts_.id_of(h));
  const std::size_t keep = std::min(hist.size(), order() - 1);
  return prob_ids(counts_.id_of(word), hist.data() + (hist.size() - keep), keep);
}

std::vector<double> NgramLm::sequence_log_probs(std::string_view text) const {
  std::vector<std::uint32_t> seq{kBosId};
  for (auto w : split_whitespace(text)) seq.push_back(counts_.id_of(w));
  seq.push_back(kEosId);
  std::vector<double> out;
  out.reserve(seq.size() - 1);
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const std::size_t hist_len = std::min(i, order() - 1);
    out.push_back(std::log(prob_ids(seq[i], seq.data() + (i - hist_len), hist_len)));
  }
  return out;
}

double NgramLm::perplexity(std::string_view text) const {
  if (split_whitespace(text).empty()) throw Error("perplexity of empty text");
  const auto lp = sequence_log_probs(text);
  const double sum = std::accumulate(lp.begin(), lp.end(), 0.0);
  return std::exp(-sum / static_cast<double>(lp.size()));
}

void NgramLm::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  const auto& words = counts_.vocab();
  // Canonical ids: reserved symbols first, then words in byte order.
  std::vector<std::uint32_t> order_ids(words.size());
  std::iota(order_ids.begin(), order_ids.end(), 0u);
  std::sort(order_ids.begin() + 3, order_ids.end(), [&](auto a, auto b) { return words[a] < words[b]; });
  std::vector<std::uint32_t> canon(words.size());
  for (std::size_t i = 0; i < order_ids.size(); ++i) canon[order_ids[i]] = static_cast<std::uint32_t>(i);

  os.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  binio::put_u32(os, kFormatVersion);
  binio::put_u32(os, static_cast<std::uint32_t>(order()));
  binio::put_u64(os, counts_.total_tokens());
  binio::put_u32(os, static_cast<std::uint32_t>(words.size()));
  for (auto id : order_ids) {
    binio::put_str(os, words[id]);
  }
  for (std::size_t k = 1; k <= order(); ++k) {
    std::map<Gram, std::uint64_t> sorted;
    for (const auto& [g, c] : counts_.grams(k)) {
      Gram m(g.size());
      for (std::size_t j = 0; j < g.size(); ++j) m[j] = canon[g[j]];
      sorted.emplace(std::move(m), c);
    }
    binio::put_u64(os, sorted.size());
    for (const auto& [g, c] : sorted) {
      for (auto id : g) binio::put_u32(os, id);
      binio::put_u64(os, c);
    }
  }
  if (!os) throw Error("failed writing " + path.string());
}

NgramLm NgramLm::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  binio::expect_magic(is, kMagic, "NGLM1 language model");
  const auto version = binio::get_u32(is);
  if (version != kFormatVersion) throw Error("unsupported language model version " + std::to_string(version));
  const auto order = static_cast<std::size_t>(binio::get_u32(is));
  NgramCounts counts(order);
  counts.total_tokens_ = binio::get_u64(is);
  const auto nwords = static_cast<std::size_t>(binio::get_u32(is));
  if (nwords < 3) throw Error("language model vocabulary lacks reserved symbols");
  std::vector<std::uint32_t> ids(nwords);
  for (std::size_t i = 0; i < nwords; ++i) {
    ids[i] = counts.intern(binio::get_str(is));
  }
  for (std::size_t k = 1; k <= order; ++k) {
    const auto n = binio::get_u64(is);
    for (std::uint64_t i = 0; i < n; ++i) {
      Gram g(k);
      for (std::size_t j = 0; j < k; ++j) {
        const auto id = static_cast<std::size_t>(binio::get_u32(is));
        if (id >= nwords) throw Error("language model gram references unknown word");
        g[j] = ids[id];
      }
      counts.counts_[k - 1][std::move(g)] = binio::get_u64(is);
    }
  }
  return NgramLm(std::move(counts));
}

bool perplexity_keep(const NgramLm& lm, std::string_view text, double threshold) {
  if (!(threshold > 0)) throw Error("perplexity threshold must be positive");
  return !(lm.perplexity(text) > threshold);
}

double nearest_rank_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile of an empty sample");
  if (!(q > 0 && q <= 1)) throw Error("quantile must be in (0, 1]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

CalibratedLm train_calibrated_lm(std::span<const std::string> corpus, std::size_t order, std::size_t holdout_every,
                                 double quantile) {
  if (holdout_every < 2) throw Error("holdout_every must be >= 2");
  std::vector<std::string> train, held;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (split_whitespace(corpus[i]).empty()) continue;
    (i % holdout_every == holdout_every - 1 ? held : train).push_back(corpus[i]);
  }
  if (held.empty()) throw Error("perplexity calibration needs at least " + std::to_string(holdout_every) + " texts");
  auto lm = NgramLm::train(train, order);
  std::vector<double> ppl;
  for (const auto& t : held) ppl.push_back(lm.perplexity(t));
  const double threshold = nearest_rank_quantile(ppl, quantile);
  return {std::move(lm), threshold, held.size()};
}

FilterResult perplexity_filter_documents(std::vector<Document> docs, const NgramLm& lm, double threshold,
                                         const TokenCounter& counter, std::size_t workers) {
  if (!(threshold > 0)) throw Error("perplexity threshold must be positive");
  std::vector<double> ppl(docs.size(), std::numeric_limits<double>::infinity());
  std::vector<std::uint64_t> tokens(docs.size());
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    tokens[i] = counter.count(docs[i].text);
    if (!split_whitespace(docs[i].text).empty()) ppl[i] = lm.perplexity(docs[i].text);
  });
  FilterResult result;
  auto& report = result.report;
  report.stage = "perplexity";
  report.docs_in = docs.size();
  auto& stats = report.rules["perplexity"];
  for (std::size_t i = 0; i < docs.size(); ++i) {
    report.tokens_in += tokens[i];
    if (ppl[i] > threshold) {
      ++stats.docs_dropped;
      stats.tokens_removed += tokens[i];
      result.dropped.push_back({docs[i].id, "perplexity", "perplexity"});
      continue;
    }
    report.tokens_out += tokens[i];
    result.kept.push_back(std::move(docs[i]));
  }
  report.docs_out = result.kept.size();
  report.details["threshold"] = threshold;
  report.details["order"] = lm.order();
  return result;
}

}  // namespace curate
