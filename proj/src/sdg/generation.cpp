#include "curate/sdg/generation.hpp"

#include <algorithm>
#include <tuple>

#include "curate/core/error.hpp"
#include "curate/core/hashing.hpp"
#include "curate/sdg/prompts.hpp"

namespace curate {

namespace {

PromptKind kind_from_json(const Json& j) {
  const auto k = parse_prompt_kind(j.get<std::string>());
  if (!k) throw Error("unknown prompt kind " + j.get<std::string>());
  return *k;
}

std::optional<QualityLabel> label_from_json(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  const auto l = parse_label(it->get<std::string>());
  if (!l) throw Error("unknown quality label " + it->get<std::string>());
  return l;
}

}  // namespace

SdgOptions SdgOptions::from_json(const Json& j) {
  SdgOptions o;
  if (!j.is_object()) throw ConfigError("sdg section must be an object");
  o.medium_high_as_high = j.value("medium_high_as_high", o.medium_high_as_high);
  if (j.contains("kinds")) {
    o.kinds.clear();
    for (const auto& k : j["kinds"]) {
      const auto parsed = parse_prompt_kind(k.get<std::string>());
      if (!parsed) throw ConfigError("sdg: unknown prompt kind " + k.get<std::string>());
      o.kinds.push_back(*parsed);
    }
  }
  o.min_tokens = j.value("min_tokens", o.min_tokens);
  o.qa.tokens_per_pair = j.value("qa_tokens_per_pair", o.qa.tokens_per_pair);
  o.qa.max_pairs = j.value("qa_max_pairs", o.qa.max_pairs);
  o.temperature = j.value("temperature", o.temperature);
  o.top_p = j.value("top_p", o.top_p);
  o.max_tokens = j.value("max_tokens", o.max_tokens);
  if (o.qa.tokens_per_pair == 0 || o.qa.max_pairs == 0) throw ConfigError("sdg: QA assembly settings must be positive");
  return o;
}

std::string SegmentJob::request_id() const {
  return parent_id + "|" + std::string(prompt_kind_name(kind)) + "|" + std::to_string(segment.index);
}

Json SegmentJob::to_json() const {
  Json j{{"parent_id", parent_id},
         {"parent_url", parent_url},
         {"parent_snapshot", parent_snapshot},
         {"parent_label", parent_label ? Json(label_name(*parent_label)) : Json(nullptr)},
         {"kind", prompt_kind_name(kind)},
         {"segment_index", segment.index},
         {"token_count", segment.token_count},
         {"lines", segment.lines},
         {"text", segment.text}};
  return j;
}

SegmentJob SegmentJob::from_json(const Json& j) {
  SegmentJob s;
  s.parent_id = j.at("parent_id").get<std::string>();
  s.parent_url = j.value("parent_url", std::string());
  s.parent_snapshot = j.value("parent_snapshot", std::string());
  s.parent_label = label_from_json(j, "parent_label");
  s.kind = kind_from_json(j.at("kind"));
  s.segment.parent_id = s.parent_id;
  s.segment.index = j.at("segment_index").get<std::size_t>();
  s.segment.token_count = j.value("token_count", std::size_t{0});
  s.segment.lines = j.value("lines", std::vector<std::size_t>{});
  s.segment.text = j.at("text").get<std::string>();
  return s;
}

Json RawGeneration::to_json() const {
  Json j{{"job", job.to_json()}, {"content", content}, {"truncated", truncated}};
  if (!error.empty()) j["error"] = error;
  j["model"] = model;
  j["temperature"] = temperature;
  j["top_p"] = top_p;
  return j;
}

RawGeneration RawGeneration::from_json(const Json& j) {
  RawGeneration r;
  r.job = SegmentJob::from_json(j.at("job"));
  r.content = j.value("content", std::string());
  r.truncated = j.value("truncated", false);
  r.error = j.value("error", std::string());
  r.model = j.value("model", std::string());
  r.temperature = j.value("temperature", 0.5);
  r.top_p = j.value("top_p", 0.9);
  return r;
}

std::string SyntheticRecord::id() const {
  std::string id = parent_id + "#" + std::string(prompt_kind_name(kind));
  if (segment_index) id += "#" + std::to_string(*segment_index);
  return id;
}

Document SyntheticRecord::to_document() const {
  Document d;
  d.id = id();
  d.url = parent_url;
  d.snapshot = parent_snapshot;
  d.text = text;
  d.label = parent_label;
  d.synthetic_kind = kind;
  d.extra["parent_id"] = parent_id;
  if (segment_index) d.extra["segment_index"] = *segment_index;
  d.extra["generation"] = {{"model", model}, {"temperature", temperature}, {"top_p", top_p}};
  return d;
}

Json KindStats::to_json() const {
  return Json{{"source_docs", source_docs},
              {"segments", segments},
              {"discarded_lines", discarded_lines},
              {"failed_requests", failed_requests},
              {"rejected", rejected},
              {"without_record", without_record},
              {"qa_fragments_dropped", qa_fragments_dropped},
              {"records", records},
              {"tokens", tokens}};
}

Json SdgReport::to_json() const {
  Json k = Json::object();
  for (const auto& [kind, s] : kinds) k[std::string(prompt_kind_name(kind))] = s.to_json();
  return Json{{"kinds", k}, {"errors", errors}};
}

std::vector<SegmentJob> plan_segments(std::span<const Document> docs, const SdgOptions& options,
                                      const TokenCounter& counter, SdgReport& report) {
  std::vector<SegmentJob> jobs;
  for (const auto& doc : docs) {
    for (auto kind : plan_generation(doc, options.medium_high_as_high)) {
      if (std::find(options.kinds.begin(), options.kinds.end(), kind) == options.kinds.end()) continue;
      auto& stats = report.kinds[kind];
      ++stats.source_docs;
      auto chunks = chunk_document(doc, kind, counter);
      stats.discarded_lines += chunks.discarded_lines.size();
      stats.segments += chunks.segments.size();
      if (chunks.segments.empty()) ++stats.without_record;
      for (auto& seg : chunks.segments) {
        jobs.push_back(SegmentJob{doc.id, doc.url, doc.snapshot, doc.label, kind, std::move(seg)});
      }
    }
  }
  return jobs;
}

std::vector<RawGeneration> run_generation(const std::vector<SegmentJob>& jobs, const Generator& generator,
                                          const SdgOptions& options, SdgReport& report) {
  std::vector<ChatRequest> requests;
  requests.reserve(jobs.size());
  for (const auto& job : jobs) {
    requests.push_back(ChatRequest{job.request_id(), render_prompt(job.kind, job.segment.text), options.temperature,
                                   options.top_p, options.max_tokens});
  }
  auto outcomes = generator(requests);
  if (outcomes.size() != jobs.size()) throw Error("generator returned a different number of outcomes");
  std::vector<RawGeneration> out;
  out.reserve(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    RawGeneration r{jobs[i], {}, false, {}, options.model, options.temperature, options.top_p};
    if (outcomes[i].response) {
      r.content = outcomes[i].response->content;
      r.truncated = outcomes[i].response->truncated;
    } else {
      r.error = outcomes[i].error.empty() ? "generation failed" : outcomes[i].error;
      ++report.kinds[jobs[i].kind].failed_requests;
      report.errors.push_back(jobs[i].request_id() + ": " + r.error);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SyntheticRecord> assemble_records(const std::vector<RawGeneration>& raw, const SdgOptions& options,
                                              const TokenCounter& counter, SdgReport& report) {
  // Group by (parent, kind) keeping first-appearance order of parents.
  std::map<std::string, std::size_t> parent_rank;
  for (const auto& r : raw) parent_rank.emplace(r.job.parent_id, parent_rank.size());
  std::vector<const RawGeneration*> sorted;
  for (const auto& r : raw) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [&](const RawGeneration* a, const RawGeneration* b) {
    return std::tuple(parent_rank[a->job.parent_id], static_cast<int>(a->job.kind), a->job.segment.index) <
           std::tuple(parent_rank[b->job.parent_id], static_cast<int>(b->job.kind), b->job.segment.index);
  });

  std::vector<SyntheticRecord> records;
  auto emit = [&](const RawGeneration& src, std::optional<std::size_t> seg, std::string text) {
    auto& stats = report.kinds[src.job.kind];
    const auto tokens = counter.count(text);
    if (tokens < options.min_tokens) {
      ++stats.rejected[std::string(kRejectUnderLength)];
      ++stats.without_record;
      return;
    }
    ++stats.records;
    stats.tokens += tokens;
    records.push_back(SyntheticRecord{src.job.parent_id, src.job.parent_url, src.job.parent_snapshot,
                                      src.job.parent_label, src.job.kind, seg, std::move(text), src.model,
                                      src.temperature, src.top_p});
  };

  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j]->job.parent_id == sorted[i]->job.parent_id &&
           sorted[j]->job.kind == sorted[i]->job.kind)
      ++j;
    const PromptKind kind = sorted[i]->job.kind;
    auto& stats = report.kinds[kind];
    std::vector<std::string> passages;
    for (std::size_t k = i; k < j; ++k) {
      const auto& r = *sorted[k];
      if (!r.error.empty()) continue;
      auto pp = postprocess(kind, r.content, r.truncated, counter, kind == PromptKind::DiverseQA ? 0 : options.min_tokens);
      if (!pp.accepted) {
        ++stats.rejected[pp.reason];
        if (kind != PromptKind::Wikipedia) ++stats.without_record;
        continue;
      }
      if (kind == PromptKind::Wikipedia) {
        passages.push_back(std::move(pp.text));
      } else if (kind == PromptKind::DiverseQA) {
        auto qa = parse_qa(pp.text);
        stats.qa_fragments_dropped += qa.dropped_fragments;
        if (qa.pairs.empty()) {
          ++stats.without_record;
          continue;
        }
        const std::uint64_t seed =
            mix64(options.seed ^ fnv1a64(r.job.parent_id + "#" + std::to_string(r.job.segment.index)));
        emit(r, r.job.segment.index, assemble_qa(r.job.segment.text, std::move(qa.pairs), seed, counter, options.qa));
      } else {
        emit(r, r.job.segment.index, std::move(pp.text));
      }
    }
    if (kind == PromptKind::Wikipedia) {
      if (passages.empty()) {
        ++stats.without_record;
      } else {
        emit(*sorted[i], std::nullopt, assemble_wikipedia(passages));
      }
    }
    i = j;
  }
  return records;
}

SdgResult generate_synthetic(std::span<const Document> docs, const Generator& generator, const SdgOptions& options,
                             const TokenCounter& counter) {
  SdgResult result;
  const auto jobs = plan_segments(docs, options, counter, result.report);
  const auto raw = run_generation(jobs, generator, options, result.report);
  result.records = assemble_records(raw, options, counter, result.report);
  return result;
}

}  // namespace curate
