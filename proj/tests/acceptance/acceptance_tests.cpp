#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/record_io.hpp"
#include "curate/core/token_counter.hpp"
#include "curate/dedup/exact_dedup.hpp"
#include "curate/dedup/minhash.hpp"
#include "curate/heuristics/ngram_lm.hpp"
#include "curate/pipeline/stats.hpp"
#include "curate/quality/buckets.hpp"
#include "curate/quality/domain_overlap.hpp"
#include "curate/sdg/chunker.hpp"
#include "curate/sdg/postprocess.hpp"
#include "curate/sdg/prompts.hpp"
#include "curate/sdg/stub_server.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace curate;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

std::string words(std::size_t n, const std::string& w) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + w;
  return out;
}

std::string g_curate;

Outcome bucket_calibration() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::gamma_distribution<double> dist(2.0, 1.5);
  std::map<std::string, std::vector<double>> scores;
  for (const std::string name : {"edu", "dclm", "ngram"}) {
    auto& v = scores[name];
    v.resize(100000);
    for (auto& s : v) s = dist(rng);
  }
  const auto bb = BucketBoundaries::fit(scores);
  double worst = 0;
  for (const auto& [name, v] : scores) {
    std::vector<int> buckets;
    buckets.reserve(v.size());
    for (double s : v) buckets.push_back(bb.bucket(name, s));
    const auto h = bucket_histogram(buckets);
    for (auto c : h.counts) worst = std::max(worst, std::abs(static_cast<double>(c) / 1e5 - 0.05));
  }
  const double secs = seconds_since(t0);
  return {worst <= 0.005 && secs < 10.0,
          "max bucket share deviation " + fmt(worst * 100, 3) + "pp, " + fmt(secs, 2) + "s"};
}

Outcome label_mapping() {
  std::size_t ok = 0;
  for (int b = 0; b < kBucketCount; ++b) {
    QualityLabel want = b == 19 ? QualityLabel::High
                        : b == 18 ? QualityLabel::MediumHigh
                        : b >= 12 ? QualityLabel::Medium
                        : b >= 7  ? QualityLabel::MediumLow
                                  : QualityLabel::Low;
    ok += bucket_to_label(b) == want;
  }
  bool rejects = true;
  for (int b : {-1, 20}) {
    try {
      (void)bucket_to_label(b);
      rejects = false;
    } catch (const std::exception&) {
    }
  }
  return {ok == 20 && rejects, std::to_string(ok) + "/20 buckets mapped, out-of-range rejected"};
}

Outcome ensemble_law() {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> bucket(0, 19);
  const std::vector<std::string> names = {"a", "b", "c"};
  const auto bb = BucketBoundaries::from_json(test::uniform_boundaries_json(names));
  std::size_t max_ok = 0;
  std::set<std::size_t> final19;
  std::map<std::string, std::set<std::size_t>> member19;
  for (std::size_t i = 0; i < 10000; ++i) {
    Document d;
    d.id = std::to_string(i);
    std::vector<int> planted;
    for (const auto& n : names) {
      const int b = bucket(rng);
      planted.push_back(b);
      d.scores[n] = test::score_for_bucket(b);
    }
    assign_buckets(d, bb);
    max_ok += d.final_bucket == *std::max_element(planted.begin(), planted.end()) && check_invariants(d).empty();
    if (d.final_bucket == 19) final19.insert(i);
    for (const auto& [n, b] : d.buckets) {
      if (b == 19) member19[n].insert(i);
    }
  }
  bool superset = true;
  for (const auto& [n, s] : member19) superset &= std::includes(final19.begin(), final19.end(), s.begin(), s.end());
  return {max_ok == 10000 && superset, std::to_string(max_ok) + "/10000 max-law, final-19 " +
                                           std::to_string(final19.size()) + " docs, superset " +
                                           (superset ? "yes" : "no")};
}

Outcome minhash_accuracy() {
  std::mt19937_64 rng(104);
  double abs_err = 0, sum = 0;
  const int pairs = 1000;
  bool exact = true;
  for (int i = 0; i < pairs; ++i) {
    std::vector<std::uint64_t> pool(200);
    for (auto& x : pool) x = rng();
    const std::vector<std::uint64_t> a(pool.begin(), pool.begin() + 150);
    const std::vector<std::uint64_t> b(pool.begin() + 50, pool.end());
    const double j = test::brute_jaccard({a.begin(), a.end()}, {b.begin(), b.end()});
    std::set<std::uint64_t> distinct(pool.begin(), pool.end());
    exact &= distinct.size() == pool.size() && std::abs(j - 0.5) < 1e-12;
    const auto seed = rng();
    const double est = estimate_jaccard(minhash_from_shingles(a, 128, seed), minhash_from_shingles(b, 128, seed));
    abs_err += std::abs(est - j);
    sum += est;
  }
  const double mae = abs_err / pairs, mean = sum / pairs;
  return {exact && mae <= 0.05 && std::abs(mean - 0.5) <= 0.02,
          std::string(exact ? "oracle Jaccard 0.5 for all pairs" : "oracle Jaccard is not 0.5") + ", mean |error| " +
              fmt(mae) + ", mean estimate " + fmt(mean)};
}

Outcome exact_dedup_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(105);
  WhitespaceCounter counter;
  std::size_t agree = 0, spans = 0;
  const std::size_t m = 10;
  for (int c = 0; c < 50; ++c) {
    const std::size_t vocab = 3 + rng() % 30;
    std::vector<std::string> texts;
    std::size_t bytes = 0;
    std::vector<std::string> fragments;
    for (int f = 0; f < 4; ++f) {
      std::string frag;
      for (int k = 0; k < 12 + static_cast<int>(rng() % 20); ++k) frag += " t" + std::to_string(rng() % vocab);
      fragments.push_back(frag);
    }
    while (true) {
      std::string t;
      const std::size_t n = 5 + rng() % 150;
      for (std::size_t k = 0; k < n; ++k) {
        if (rng() % 25 == 0) t += fragments[rng() % fragments.size()];
        else t += " t" + std::to_string(rng() % vocab);
      }
      t = t.substr(1);
      if (bytes + t.size() + 1 > 10000) break;
      bytes += t.size() + 1;
      texts.push_back(t);
    }
    std::vector<Document> docs;
    std::map<std::string, std::uint32_t> ids;
    std::vector<std::vector<std::uint32_t>> tokens;
    std::vector<std::vector<std::string>> word_lists;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      Document d;
      d.id = "c" + std::to_string(c) + "-" + std::to_string(i);
      d.snapshot = "CC-MAIN-2024-10";
      d.text = texts[i];
      docs.push_back(d);
      std::istringstream is(texts[i]);
      std::vector<std::uint32_t> ts;
      std::vector<std::string> ws;
      for (std::string w; is >> w;) {
        ts.push_back(ids.emplace(w, static_cast<std::uint32_t>(ids.size())).first->second);
        ws.push_back(w);
      }
      tokens.push_back(ts);
      word_lists.push_back(ws);
    }
    const auto mask = test::brute_duplicate_mask(tokens, m);
    ExactDedupParams p;
    p.min_match_tokens = m;
    p.shard_count = 1;
    const auto r = exact_substring_dedup(docs, p, counter);

    std::vector<std::string> want_kept_ids;
    std::vector<std::vector<std::string>> want_words;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      std::vector<std::string> kept;
      for (std::size_t k = 0; k < mask[i].size(); ++k) {
        if (!mask[i][k]) kept.push_back(word_lists[i][k]);
      }
      spans += test::true_runs(mask[i]).size();
      if (kept.empty()) continue;
      want_kept_ids.push_back(docs[i].id);
      want_words.push_back(kept);
    }
    bool same = r.docs.size() == want_kept_ids.size() && r.report.reconciles();
    for (std::size_t i = 0; same && i < r.docs.size(); ++i) {
      std::istringstream is(r.docs[i].text);
      std::vector<std::string> got;
      for (std::string w; is >> w;) got.push_back(w);
      same = r.docs[i].id == want_kept_ids[i] && got == want_words[i];
    }
    same = same && duplicate_token_mask(tokens, m) == mask;
    agree += same;
  }
  const double secs = seconds_since(t0);
  return {agree == 50 && secs < 60.0, std::to_string(agree) + "/50 corpora match the oracle (" +
                                          std::to_string(spans) + " duplicate spans), " + fmt(secs, 2) + "s"};
}

Outcome kneser_ney() {
  std::mt19937_64 rng(106);
  double worst_sum = 0, worst_rel = 0;
  for (std::size_t order : {1, 2, 3, 4, 5}) {
    std::vector<std::string> corpus;
    for (int d = 0; d < 60; ++d) {
      std::string t;
      const auto n = 1 + rng() % 20;
      for (std::size_t i = 0; i < n; ++i) t += (i ? " s" : "s") + std::to_string(rng() % 45);
      corpus.push_back(t);
    }
    const auto lm = NgramLm::train(corpus, order);
    const auto vocab = lm.predicted_vocab();
    std::vector<std::vector<std::string>> histories = {{}, {"<s>"}};
    for (std::size_t k = 2; k <= order; ++k) {
      for (const auto& [g, c] : lm.counts().grams(k)) {
        std::vector<std::string> h;
        for (std::size_t i = 0; i + 1 < g.size(); ++i) h.push_back(lm.counts().vocab()[g[i]]);
        histories.push_back(h);
      }
    }
    for (int i = 0; i < 50; ++i) {
      std::vector<std::string> h;
      for (std::size_t k = 0; k + 1 < order; ++k) h.push_back(vocab[rng() % vocab.size()]);
      histories.push_back(h);
    }
    for (const auto& h : histories) {
      double total = 0;
      for (const auto& w : vocab) total += lm.prob(w, h);
      worst_sum = std::max(worst_sum, std::abs(total - 1.0));
    }
    const test::KneserNeyOracle oracle(corpus, order);
    for (int i = 0; i < 40; ++i) {
      std::string t;
      const auto n = 1 + rng() % 15;
      for (std::size_t k = 0; k < n; ++k) t += (k ? " s" : "s") + std::to_string(rng() % 50);
      const double a = lm.perplexity(t), b = oracle.perplexity(t);
      worst_rel = std::max(worst_rel, std::abs(a - b) / b);
    }
  }
  std::vector<std::string> words;
  for (int i = 0; i < 48; ++i) words.push_back("u" + std::to_string(i));
  const auto uni = NgramLm::uniform(words);
  const double v = static_cast<double>(uni.vocab_size());
  double worst_uni = 0;
  for (const std::string t : {"u1", "u1 u2 u3", "zz u7 qq"}) worst_uni = std::max(worst_uni, std::abs(uni.perplexity(t) - v));
  std::ostringstream detail;
  detail << "max |sum-1| " << worst_sum << ", max rel ppl diff " << worst_rel << ", uniform ppl - V " << worst_uni
         << " (V=" << uni.vocab_size() << ")";
  return {worst_sum <= 1e-9 && worst_rel <= 1e-9 && worst_uni <= 1e-9 * v, detail.str()};
}

struct SmokeRun {
  bool ok = false;
  std::string detail;
  fs::path out1, out2;
  double secs1 = 0, secs2 = 0;
  test::SmokeCorpus corpus;
};

int run_cli(const std::string& args) {
  const std::string cmd = g_curate + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> files_under(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = test::read_file(e.path());
  }
  return out;
}

Outcome hq_bypass(const SmokeRun& run) {
  if (!run.ok) return {false, run.detail};
  std::set<std::string> kept;
  for (const auto& e : fs::recursive_directory_iterator(run.out1)) {
    if (e.path().string().ends_with(".jsonl.gz") && e.path().parent_path().filename() == "real") {
      for (const auto& d : read_records(e.path(), RecordFormat::JsonlGz)) kept.insert(d.id);
    }
  }
  std::map<std::string, std::string> drops;
  for (const auto& j : read_json_lines(run.out1 / "reports" / "drops.jsonl")) drops[j["id"]] = j["rule"];
  const bool high_kept = kept.count(run.corpus.lorem_high_id) == 1;
  const auto it = drops.find(run.corpus.lorem_low_id);
  const bool low_dropped = it != drops.end() && it->second == "c4_lorem_ipsum" && !kept.count(run.corpus.lorem_low_id);
  return {high_kept && low_dropped, std::string("bucket-19 lorem doc ") + (high_kept ? "kept" : "missing") +
                                        ", bucket-5 lorem doc " +
                                        (it == drops.end() ? std::string("not dropped") : "dropped by " + it->second)};
}

Outcome chunker_fuzz() {
  WhitespaceCounter counter;
  std::mt19937_64 rng(108);
  const std::map<PromptKind, std::size_t> limits = {{PromptKind::Wikipedia, 512},
                                                    {PromptKind::Distill, 2000},
                                                    {PromptKind::ExtractKnowledge, 1400},
                                                    {PromptKind::DiverseQA, 1000},
                                                    {PromptKind::KnowledgeList, 1000}};
  std::size_t bad = 0, segments = 0, discarded = 0;
  bool limits_ok = true;
  for (auto k : kAllPromptKinds) limits_ok &= token_limit(k) == limits.at(k);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto kind = kAllPromptKinds[rng() % kAllPromptKinds.size()];
    const std::size_t limit = limits.at(kind);
    const std::size_t overhead = prompt_overhead(kind, counter);
    std::vector<std::size_t> lens(rng() % 30);
    std::string text;
    for (std::size_t i = 0; i < lens.size(); ++i) {
      lens[i] = 1 + rng() % (rng() % 8 == 0 ? 2200 : limit / 3);
      text += words(lens[i], "l" + std::to_string(i)) + (rng() % 6 == 0 ? "\n\n" : "\n");
    }
    Document d;
    d.id = "f" + std::to_string(trial);
    d.text = text;
    const auto r = chunk_document(d, kind, counter);
    bool ok = r.line_count == lens.size();
    std::vector<std::size_t> order;
    for (const auto& s : r.segments) {
      ok &= counter.count(s.text) + overhead <= limit;
      std::string joined;
      for (auto li : s.lines) {
        joined += (joined.empty() ? "" : "\n") + words(lens[li], "l" + std::to_string(li));
        order.push_back(li);
      }
      ok &= joined == s.text;
    }
    ok &= std::is_sorted(order.begin(), order.end());
    std::vector<std::size_t> want_discard;
    for (std::size_t i = 0; i < lens.size(); ++i) {
      if (lens[i] + overhead > limit) want_discard.push_back(i);
    }
    ok &= r.discarded_lines == want_discard;
    ok &= order.size() + r.discarded_lines.size() == lens.size();
    bad += !ok;
    segments += r.segments.size();
    discarded += r.discarded_lines.size();
  }
  return {bad == 0 && limits_ok && discarded > 0, std::to_string(10000 - bad) + "/10000 documents valid, " +
                                                      std::to_string(segments) + " segments, " +
                                                      std::to_string(discarded) + " over-length lines discarded"};
}

Outcome sdg_golden() {
  WhitespaceCounter counter;
  std::vector<std::string> failures;
  auto expect = [&](bool c, const std::string& what) {
    if (!c) failures.push_back(what);
  };
  const std::string body = words(55, "fact") + ".";
  auto p = postprocess(PromptKind::Wikipedia, "Here is a paraphrased version: " + body, false, counter);
  expect(p.accepted && p.text == body, "prefix");
  p = postprocess(PromptKind::Distill, "**Key** point: **" + body + "**", false, counter);
  expect(p.accepted && p.text == "Key point: " + body, "asterisks");
  expect(postprocess(PromptKind::Distill, words(49, "w") + ".", false, counter).reason == kRejectUnderLength, "49");
  expect(postprocess(PromptKind::Distill, words(50, "w") + ".", false, counter).accepted, "50");
  const std::vector<QaPair> reference = {
      {"Which year did the United Nations implement the 2030 agenda for SDGs?", "January 1, 2016"},
      {"What are the three key dimensions of sustainable development covered by the SDGs?",
       "(a) economic growth, (b) social inclusion, and (c) environmental protection"},
      {"Which of the following can flossing prevent? A) Cavities B) Gum disease C) Both A and B D) Neither A nor B",
       "C) Both A and B"},
      {"Is flossing important even if you brush your teeth twice a day?",
       "Yes, flossing is important as it reaches areas that brushing alone cannot."},
  };
  std::string response = std::string(kQaHeader) + "\n";
  std::string bold;
  for (const auto& q : reference) {
    response += "- Question: " + q.question + " Answer: " + q.answer + "\n";
    bold += "**Question**: " + q.question + "\n\n**Answer**: " + q.answer + "\n\n";
  }
  expect(parse_qa(response).pairs == reference, "qa bullets");
  expect(parse_qa(postprocess(PromptKind::DiverseQA, bold, false, counter, 1).text).pairs == reference, "qa bold");
  std::string detail = failures.empty() ? "all 6 golden cases match" : "failed:";
  for (const auto& f : failures) detail += " " + f;
  return {failures.empty(), detail};
}

SmokeRun smoke_runs(const fs::path& work) {
  SmokeRun run;
  run.corpus = test::make_smoke_corpus();
  StubLlmServer server;
  const auto config = test::write_smoke_workspace(work, run.corpus, server.base_url());
  run.out1 = work / "out1";
  run.out2 = work / "out2";
  auto t0 = Clock::now();
  const int rc1 = run_cli("run --config " + config.string() + " --output " + run.out1.string());
  run.secs1 = seconds_since(t0);
  t0 = Clock::now();
  const int rc2 = run_cli("run --config " + config.string() + " --output " + run.out2.string());
  run.secs2 = seconds_since(t0);
  run.ok = rc1 == 0 && rc2 == 0;
  run.detail = run.ok ? "" : "curate run exited with " + std::to_string(rc1) + "/" + std::to_string(rc2);
  return run;
}

Outcome determinism(const SmokeRun& run) {
  if (!run.ok) return {false, run.detail};
  const auto a = files_under(run.out1), b = files_under(run.out2);
  std::size_t parts = 0;
  for (const auto& [rel, content] : a) parts += rel.ends_with(".jsonl.gz");
  const bool same = a == b && parts > 0 && a.count("reports/reports.json") && a.count("reports/reports.txt");
  return {same && run.secs1 < 30.0 && run.secs2 < 30.0,
          std::to_string(a.size()) + " files (" + std::to_string(parts) + " partitions) " +
              (same ? "byte-identical" : "differ") + ", runs " + fmt(run.secs1, 2) + "s and " + fmt(run.secs2, 2) +
              "s on " + std::to_string(run.corpus.docs.size()) + " docs"};
}

Outcome label_share_stats(const fs::path& work) {
  const std::vector<std::pair<QualityLabel, std::size_t>> tokens = {{QualityLabel::High, 1263},
                                                                    {QualityLabel::MediumHigh, 1152},
                                                                    {QualityLabel::Medium, 4624},
                                                                    {QualityLabel::MediumLow, 2043},
                                                                    {QualityLabel::Low, 918}};
  const std::map<QualityLabel, int> bucket = {{QualityLabel::High, 19},
                                              {QualityLabel::MediumHigh, 18},
                                              {QualityLabel::Medium, 14},
                                              {QualityLabel::MediumLow, 9},
                                              {QualityLabel::Low, 3}};
  const fs::path dir = work / "label-shares";
  std::size_t id = 0;
  for (const auto& [label, total] : tokens) {
    std::vector<Document> docs;
    for (std::size_t left = total; left > 0;) {
      const std::size_t n = std::min<std::size_t>(left, 97);
      Document d;
      d.id = "ls-" + std::to_string(id++);
      d.text = words(n, "tok");
      d.buckets["edu"] = bucket.at(label);
      d.final_bucket = bucket.at(label);
      d.label = label;
      docs.push_back(d);
      left -= n;
    }
    const auto path = dir / std::string(label_name(label)) / "real" / "part-00000.jsonl.gz";
    fs::create_directories(path.parent_path());
    write_records(docs, path, RecordFormat::JsonlGz);
  }
  Document syn;
  syn.id = "ls-syn";
  syn.text = words(500, "syn");
  syn.label = QualityLabel::High;
  syn.synthetic_kind = PromptKind::Distill;
  fs::create_directories(dir / "high" / "distill");
  write_records(std::vector<Document>{syn}, dir / "high" / "distill" / "part-00000.jsonl.gz", RecordFormat::JsonlGz);

  const auto stats = dataset_stats(dir, WhitespaceCounter());
  const std::vector<std::string> want = {"12.63", "11.52", "46.24", "20.43", "9.18"};
  std::vector<std::string> got;
  for (const auto& r : stats.labels) got.push_back(fmt(r.percent, 2));
  const auto text = stats.to_text();
  bool in_text = true;
  for (const auto& w : want) in_text &= text.find(" " + w + "%") != std::string::npos;
  std::string joined;
  for (const auto& g : got) joined += (joined.empty() ? "" : "/") + g;
  return {got == want && in_text && stats.real_tokens == 10000, "percentages " + joined};
}

Outcome domain_overlap() {
  // Two scorers' high-quality sets sharing 368 of each side's top 1000 domains.
  const std::size_t both_docs = 11528, only_a_docs = 40223, only_b_docs = 61845;
  const std::size_t shared_domains = 368, top_k = 1000, own_domains = top_k - shared_domains;
  std::vector<Document> a, b;
  auto doc = [](const std::string& id, const std::string& domain) {
    Document d;
    d.id = id;
    d.url = "https://www." + domain + "/page/" + id;
    return d;
  };
  for (std::size_t i = 0; i < both_docs; ++i) {
    const auto d = doc("both-" + std::to_string(i), "shared" + std::to_string(i % shared_domains) + ".org");
    a.push_back(d);
    b.push_back(d);
  }
  auto side = [&](std::vector<Document>& out, const std::string& tag, std::size_t count, std::size_t per_domain) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::string domain = i < own_domains * per_domain ? tag + std::to_string(i / per_domain) + ".com"
                                                              : tag + "-tail" + std::to_string(i) + ".net";
      out.push_back(doc(tag + "-" + std::to_string(i), domain));
    }
  };
  side(a, "edu", only_a_docs, 40);
  side(b, "dclm", only_b_docs, 60);

  const auto r = domain_overlap_report(a, b, top_k);
  const std::size_t uni = both_docs + only_a_docs + only_b_docs;
  const bool counts = r.docs_union == uni && r.docs_both == both_docs && r.docs_only_a == only_a_docs &&
                      r.docs_only_b == only_b_docs;
  const bool pcts = r.pct_both == 100.0 * static_cast<double>(both_docs) / static_cast<double>(uni) &&
                    r.pct_only_a == 100.0 * static_cast<double>(only_a_docs) / static_cast<double>(uni) &&
                    r.pct_only_b == 100.0 * static_cast<double>(only_b_docs) / static_cast<double>(uni);
  const bool rounded = fmt(r.pct_both, 1) == "10.1" && fmt(r.pct_only_a, 1) == "35.4" && fmt(r.pct_only_b, 1) == "54.4";
  const bool domains = r.top_a.size() == top_k && r.top_b.size() == top_k &&
                       r.top_intersection.size() == shared_domains && r.top_only_a.size() == own_domains &&
                       r.top_only_b.size() == own_domains;
  return {counts && pcts && rounded && domains,
          "union " + std::to_string(r.docs_union) + ", both " + fmt(r.pct_both, 1) + "%, only A " +
              fmt(r.pct_only_a, 1) + "%, only B " + fmt(r.pct_only_b, 1) + "%, top-" + std::to_string(top_k) +
              " intersection " + std::to_string(r.top_intersection.size())};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance_tests <path to curate>\n";
    return 2;
  }
  g_curate = argv[1];
  test::TempDir work("curate-acceptance");
  SmokeRun smoke;
  bool smoke_started = false;
  auto ensure_smoke = [&]() -> const SmokeRun& {
    if (!smoke_started) {
      smoke = smoke_runs(work.path());
      smoke_started = true;
    }
    return smoke;
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"bucket calibration", bucket_calibration},
      {"label mapping", label_mapping},
      {"ensemble law", ensemble_law},
      {"minhash accuracy", minhash_accuracy},
      {"exact-substring dedup oracle", exact_dedup_oracle},
      {"kneser-ney language model", kneser_ney},
      {"high-quality bypass", [&] { return hq_bypass(ensure_smoke()); }},
      {"chunker fuzz", chunker_fuzz},
      {"sdg post-processing golden suite", sdg_golden},
      {"end-to-end determinism", [&] { return determinism(ensure_smoke()); }},
      {"label statistics reproduction", [&] { return label_share_stats(work.path()); }},
      {"domain overlap report", domain_overlap},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
