#include "curate/pipeline/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <spdlog/spdlog.h>

#include "curate/core/record_io.hpp"
#include "curate/dedup/exact_dedup.hpp"
#include "curate/dedup/fuzzy_dedup.hpp"
#include "curate/heuristics/ngram_lm.hpp"
#include "curate/pipeline/stages.hpp"
#include "curate/pipeline/stats.hpp"
#include "curate/quality/buckets.hpp"
#include "curate/quality/scorer.hpp"
#include "curate/sdg/generation.hpp"

namespace curate {

namespace {

namespace fs = std::filesystem;

template <typename Fn>
auto run_stage(const std::string& name, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  try {
    auto out = fn();
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    spdlog::info("stage {} done in {:.2f}s", name, took.count());
    return out;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string stage_table(const std::vector<StageReport>& stages) {
  std::ostringstream os;
  os << std::left << std::setw(26) << "Stage" << std::right << std::setw(10) << "Docs in" << std::setw(10)
     << "Docs out" << std::setw(14) << "Tokens in" << std::setw(14) << "Tokens out" << std::setw(14) << "Removed"
     << '\n';
  for (const auto& s : stages) {
    os << std::left << std::setw(26) << s.stage << std::right << std::setw(10) << s.docs_in << std::setw(10)
       << s.docs_out << std::setw(14) << s.tokens_in << std::setw(14) << s.tokens_out << std::setw(14)
       << s.tokens_removed() << '\n';
    for (const auto& [rule, r] : s.rules) {
      if (r.docs_dropped == 0 && r.lines_dropped == 0 && r.tokens_removed == 0) continue;
      os << "    " << std::left << std::setw(28) << rule << std::right << " docs " << r.docs_dropped << ", lines "
         << r.lines_dropped << ", tokens " << r.tokens_removed << '\n';
    }
  }
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
}

}  // namespace

fs::path partition_path(const Document& doc, std::size_t shard_count) {
  if (!doc.label) throw Error("document " + doc.id + " has no label");
  char part[32];
  std::snprintf(part, sizeof part, "part-%05zu.jsonl.gz", shard_of(doc, shard_count));
  const std::string kind = doc.synthetic_kind ? std::string(prompt_kind_name(*doc.synthetic_kind)) : "real";
  return fs::path(std::string(label_name(*doc.label))) / kind / part;
}

PipelineResult run_pipeline(const PipelineConfig& config, const Generator* generator) {
  config.validate();
  const auto counter = make_token_counter(config.tokenizer);
  PipelineResult result;
  Json reports = Json::object();
  std::vector<std::string> record_errors;

  auto docs = run_stage("read", [&] { return read_inputs(config.input, &record_errors); });
  for (const auto& e : record_errors) spdlog::warn("record error: {}", e);
  reports["input"] = {{"documents", docs.size()}, {"record_errors", record_errors.size()}, {"errors", record_errors}};
  const std::size_t input_docs = docs.size();

  auto absorb = [&](StageOutput&& out) {
    for (auto& d : out.dropped) result.dropped.push_back(std::move(d));
    result.stages.push_back(std::move(out.report));
    return std::move(out.docs);
  };

  std::uint64_t flow_start = 0;
  if (config.stages.extract) {
    ExtractionParams params = config.extraction;
    StopwordSet custom;
    if (config.stopwords) {
      custom = load_stopwords(*config.stopwords);
      params.stopwords = &custom;
    }
    docs = absorb(run_stage("extract", [&] { return extract_stage(std::move(docs), params, *counter, config.workers); }));
    flow_start = result.stages.back().tokens_out;
  } else {
    for (const auto& d : docs) flow_start += counter->count(d.text);
  }

  if (config.stages.langid) {
    docs = absorb(run_stage("langid", [&] { return langid_stage(std::move(docs), config.langid, *counter, config.workers); }));
  }

  DedupAccounting dedup;
  dedup.total_docs = docs.size();
  for (const auto& d : docs) dedup.total_tokens += counter->count(d.text);

  Json clusters = Json::array();
  if (config.stages.dedup_fuzzy) {
    auto fr = run_stage("dedup_fuzzy", [&] { return fuzzy_dedup(std::move(docs), config.fuzzy, *counter); });
    for (const auto& c : fr.clusters) clusters.push_back(c.to_json());
    for (const auto& id : fr.removed_ids) result.dropped.push_back({id, "dedup_fuzzy", "fuzzy_duplicate"});
    result.stages.push_back(std::move(fr.report));
    docs = std::move(fr.kept);
  }
  if (config.stages.dedup_exact) {
    auto er = run_stage("dedup_exact", [&] { return exact_substring_dedup(std::move(docs), config.exact, *counter); });
    for (const auto& id : er.dropped_ids) result.dropped.push_back({id, "dedup_exact", "exact_substring"});
    result.stages.push_back(std::move(er.report));
    docs = std::move(er.docs);
  }
  dedup.unique_docs = docs.size();
  for (const auto& d : docs) dedup.unique_tokens += counter->count(d.text);
  reports["dedup"] = {{"total_docs", dedup.total_docs},
                      {"total_tokens", dedup.total_tokens},
                      {"unique_docs", dedup.unique_docs},
                      {"unique_tokens", dedup.unique_tokens}};

  // Score, bucket, label.
  std::vector<std::string> members;
  const auto boundaries = run_stage("quality", [&] {
    std::vector<std::unique_ptr<Scorer>> scorers;
    for (const auto& spec : config.quality.scorers) {
      scorers.push_back(make_scorer(spec));
      if (spec.in_ensemble) members.push_back(spec.name);
    }
    score_documents(docs, scorers, config.workers);
    BucketBoundaries b;
    if (config.quality.boundaries) {
      b = BucketBoundaries::load(*config.quality.boundaries);
    } else {
      std::map<std::string, std::vector<double>> scores;
      for (const auto& name : members) {
        auto& v = scores[name];
        for (const auto& d : docs) v.push_back(d.scores.at(name));
      }
      b = BucketBoundaries::fit(scores);
    }
    for (auto& d : docs) assign_buckets(d, b, members);
    return b;
  });
  {
    StageReport q;
    q.stage = "quality";
    q.docs_in = q.docs_out = docs.size();
    for (const auto& d : docs) q.tokens_in += counter->count(d.text);
    q.tokens_out = q.tokens_in;
    q.details["boundaries"] = config.quality.boundaries ? "frozen" : "fitted";
    Json hist = Json::object();
    for (const auto& name : members) {
      std::vector<int> b;
      for (const auto& d : docs) b.push_back(d.buckets.at(name));
      hist[name] = bucket_histogram(b).to_json();
    }
    std::vector<int> finals;
    for (const auto& d : docs) finals.push_back(*d.final_bucket);
    hist["final"] = bucket_histogram(finals).to_json();
    q.details["bucket_histograms"] = hist;
    result.stages.push_back(std::move(q));
  }

  // Route by label.
  std::map<QualityLabel, std::vector<Document>> by_label;
  for (auto& d : docs) by_label[*d.label].push_back(std::move(d));
  docs.clear();

  std::optional<NgramLm> lm;
  double ppl_threshold = 0;
  Json ppl_info = nullptr;
  if (config.stages.perplexity) {
    run_stage("perplexity_model", [&] {
      if (config.perplexity.model) {
        lm = NgramLm::load(*config.perplexity.model);
        ppl_threshold = *config.perplexity.threshold;
        ppl_info = {{"source", "model"}, {"threshold", ppl_threshold}};
      } else {
        const auto corpus = read_text_corpus(*config.perplexity.train_corpus);
        auto cal = train_calibrated_lm(corpus, config.perplexity.order, config.perplexity.holdout_every,
                                       config.perplexity.quantile);
        ppl_threshold = config.perplexity.threshold.value_or(cal.threshold);
        ppl_info = {{"source", "trained"},
                    {"order", config.perplexity.order},
                    {"training_texts", corpus.size() - cal.holdout_docs},
                    {"holdout_texts", cal.holdout_docs},
                    {"calibrated_threshold", cal.threshold},
                    {"threshold", ppl_threshold}};
        lm = std::move(cal.lm);
      }
      spdlog::info("perplexity threshold {:.3f}", ppl_threshold);
      return 0;
    });
  }
  reports["perplexity"] = ppl_info;

  const Ruleset rules = config.stages.heuristics ? config.ruleset() : Ruleset{};
  Json routing = Json::object();
  std::vector<Document> final_real;
  std::vector<Document> sdg_sources;
  for (auto label : kAllLabels) {
    auto& group = by_label[label];
    const std::size_t in = group.size();
    const bool filtered = label != QualityLabel::High && label != QualityLabel::MediumHigh;
    const std::string suffix = ":" + std::string(label_name(label));
    if (filtered && config.stages.heuristics) {
      auto fr = run_stage("heuristics" + suffix, [&] { return filter_documents(std::move(group), rules, *counter, config.workers); });
      fr.report.stage += suffix;
      for (auto& d : fr.dropped) result.dropped.push_back(std::move(d));
      result.stages.push_back(std::move(fr.report));
      group = std::move(fr.kept);
    }
    if (filtered && config.stages.perplexity) {
      auto fr = run_stage("perplexity" + suffix, [&] {
        return perplexity_filter_documents(std::move(group), *lm, ppl_threshold, *counter, config.workers);
      });
      fr.report.stage += suffix;
      for (auto& d : fr.dropped) result.dropped.push_back(std::move(d));
      result.stages.push_back(std::move(fr.report));
      group = std::move(fr.kept);
    }
    routing[std::string(label_name(label))] = {{"in", in}, {"out", group.size()}, {"filtered", filtered}};
    for (auto& d : group) {
      final_real.push_back(d);
      if (config.stages.sdg && !plan_generation(d, config.sdg.medium_high_as_high).empty())
        sdg_sources.push_back(std::move(d));
    }
  }
  reports["routing"] = routing;

  std::vector<Document> synthetic;
  if (config.stages.sdg) {
    auto sdg = run_stage("sdg", [&] {
      if (generator) return generate_synthetic(sdg_sources, *generator, config.sdg, *counter);
      ChatClient client(config.endpoint);
      return generate_synthetic(sdg_sources, client.as_generator(), config.sdg, *counter);
    });
    for (const auto& e : sdg.report.errors) spdlog::warn("sdg: {}", e);
    for (const auto& r : sdg.records) synthetic.push_back(r.to_document());
    reports["sdg"] = sdg.report.to_json();
  }

  // Outputs.
  run_stage("write", [&] {
    const fs::path out = config.output_dir;
    fs::create_directories(out);
    for (auto l : kAllLabels) fs::remove_all(out / std::string(label_name(l)));
    fs::remove_all(out / "reports");
    fs::create_directories(out / "reports");

    std::map<fs::path, std::vector<const Document*>> parts;
    for (const auto& d : final_real) parts[partition_path(d, config.shard_count)].push_back(&d);
    for (const auto& d : synthetic) parts[partition_path(d, config.shard_count)].push_back(&d);
    for (const auto& [rel, list] : parts) {
      RecordWriter w(out / rel, RecordFormat::JsonlGz);
      for (const auto* d : list) w.write(*d);
      w.close();
      result.partitions[rel.generic_string()] = list.size();
    }

    RecordWriter drops(out / "reports" / "drops.jsonl", RecordFormat::Jsonl);
    for (const auto& d : result.dropped) drops.write_json(dropped_to_json(d));
    drops.close();
    RecordWriter cl(out / "reports" / "clusters.jsonl", RecordFormat::Jsonl);
    for (const auto& c : clusters) cl.write_json(c);
    cl.close();
    boundaries.save(out / "reports" / "boundaries.json");
    return 0;
  });

  result.real_docs = final_real.size();
  result.synthetic_docs = synthetic.size();

  std::uint64_t removed = 0;
  for (const auto& s : result.stages) removed += s.tokens_removed();
  std::uint64_t final_tokens = 0;
  for (const auto& d : final_real) final_tokens += counter->count(d.text);

  Json stages = Json::array();
  for (const auto& s : result.stages) stages.push_back(s.to_json());
  reports["stages"] = stages;
  reports["token_flow"] = {{"start_tokens", flow_start},
                           {"removed_tokens", removed},
                           {"final_real_tokens", final_tokens},
                           {"balanced", flow_start == final_tokens + removed}};
  reports["routing_complete"] = result.real_docs + result.dropped.size() == input_docs;
  Json parts = Json::object();
  for (const auto& [p, n] : result.partitions) parts[p] = n;
  reports["partitions"] = parts;

  std::vector<Document> all = final_real;
  all.insert(all.end(), synthetic.begin(), synthetic.end());
  auto stats = compute_stats(all, *counter);
  stats.dedup = dedup;
  reports["stats"] = stats.to_json();

  const fs::path rep = config.output_dir / "reports";
  write_text(rep / "reports.json", reports.dump(2) + "\n");
  write_text(rep / "reports.txt", stage_table(result.stages) + "\n" + stats.to_text());
  result.reports = std::move(reports);
  return result;
}

}  // namespace curate
