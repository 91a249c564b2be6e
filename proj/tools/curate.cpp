#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "curate/core/error.hpp"
#include "curate/core/record_io.hpp"
#include "curate/core/token_counter.hpp"
#include "curate/dedup/exact_dedup.hpp"
#include "curate/dedup/fuzzy_dedup.hpp"
#include "curate/heuristics/ngram_lm.hpp"
#include "curate/heuristics/rules.hpp"
#include "curate/pipeline/config.hpp"
#include "curate/pipeline/pipeline.hpp"
#include "curate/pipeline/stages.hpp"
#include "curate/pipeline/stats.hpp"
#include "curate/quality/buckets.hpp"
#include "curate/quality/domain_overlap.hpp"
#include "curate/quality/scorer.hpp"
#include "curate/sdg/chat_client.hpp"
#include "curate/sdg/generation.hpp"

namespace fs = std::filesystem;
using namespace curate;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> inputs;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, Common& c, bool output_required = true) {
  cmd->add_option("--config", c.config, "configuration file (JSON with comments)");
  cmd->add_option("--input", c.inputs, "input file(s)")->required();
  auto* out = cmd->add_option("--output", c.output, "output path");
  if (output_required) out->required();
  cmd->add_option("--seed", c.seed, "random seed (overrides the config)");
  cmd->add_option("--workers", c.workers, "worker threads (overrides the config)");
}

// Parameters come from --config when given, defaults otherwise.
PipelineConfig settings(const Common& c) {
  PipelineConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
  } else {
    cfg = PipelineConfig::from_json(Json::object(), fs::current_path());
  }
  if (c.seed) {
    cfg.seed = *c.seed;
    cfg.sdg.seed = *c.seed;
  }
  if (c.workers) {
    if (*c.workers == 0) throw ConfigError("--workers must be >= 1");
    cfg.workers = *c.workers;
    cfg.fuzzy.workers = cfg.exact.workers = *c.workers;
  }
  return cfg;
}

std::unique_ptr<TokenCounter> counter_for(const PipelineConfig& cfg) {
  try {
    return make_token_counter(cfg.tokenizer);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::vector<Document> read_documents(const std::vector<std::string>& inputs) {
  std::vector<Document> docs;
  for (const auto& p : inputs) {
    if (!fs::exists(p)) throw ConfigError("input file does not exist: " + p);
    std::vector<RecordError> errors;
    auto part = read_records(p, format_from_path(p), &errors);
    for (const auto& e : errors) spdlog::warn("{} @{}: {}", p, e.offset, e.message);
    for (auto& d : part) docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<Json> read_json_inputs(const std::vector<std::string>& inputs) {
  std::vector<Json> out;
  for (const auto& p : inputs) {
    if (!fs::exists(p)) throw ConfigError("input file does not exist: " + p);
    for (auto& j : read_json_lines(p)) out.push_back(std::move(j));
  }
  return out;
}

void write_documents(const std::vector<Document>& docs, const std::string& path) {
  const auto n = write_records(docs, path, format_from_path(path));
  spdlog::info("wrote {} documents to {}", n, path);
}

void write_json_lines(const std::vector<Json>& items, const std::string& path) {
  RecordWriter w(path, format_from_path(path));
  for (const auto& j : items) w.write_json(j);
  w.close();
  spdlog::info("wrote {} records to {}", items.size(), path);
}

void write_json_file(const Json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << j.dump(2) << '\n';
}

struct StageFiles {
  std::string report;
  std::string drops;
};

void add_stage_files(CLI::App* cmd, StageFiles& f) {
  cmd->add_option("--report", f.report, "write the stage report as JSON");
  cmd->add_option("--drops", f.drops, "write dropped document ids as JSONL");
}

void finish_stage(const StageReport& report, const std::vector<DroppedDocument>& dropped, const StageFiles& f) {
  spdlog::info("{}: docs {} -> {}, tokens {} -> {}", report.stage, report.docs_in, report.docs_out, report.tokens_in,
               report.tokens_out);
  if (!f.report.empty()) write_json_file(report.to_json(), f.report);
  if (!f.drops.empty()) {
    std::vector<Json> lines;
    for (const auto& d : dropped) lines.push_back(dropped_to_json(d));
    write_json_lines(lines, f.drops);
  }
}

std::vector<DroppedDocument> drops_from_ids(const std::vector<std::string>& ids, const std::string& stage,
                                            const std::string& rule) {
  std::vector<DroppedDocument> out;
  for (const auto& id : ids) out.push_back({id, stage, rule});
  return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
    throw ConfigError(std::string(what) + " expects NAME=PATH, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

int print_usage_error(CLI::App& app, const CLI::ParseError& e) {
  CLI::App* target = &app;
  for (auto* sub : app.get_subcommands()) target = sub;
  std::cerr << "error: " << e.what() << "\n\n" << target->help();
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("curate"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"curate: web-crawl curation pipeline"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
      ->each([](const std::string& level) { spdlog::set_level(spdlog::level::from_str(level)); });

  Common common;
  StageFiles files;

  // extract
  auto* extract = app.add_subcommand("extract", "extract main text from HTML records");
  add_common(extract, common);
  add_stage_files(extract, files);
  extract->callback([&] {
    auto cfg = settings(common);
    const auto counter = counter_for(cfg);
    StopwordSet custom;
    if (cfg.stopwords) {
      custom = load_stopwords(*cfg.stopwords);
      cfg.extraction.stopwords = &custom;
    }
    auto out = extract_stage(read_documents(common.inputs), cfg.extraction, *counter, cfg.workers);
    write_documents(out.docs, common.output);
    finish_stage(out.report, out.dropped, files);
  });

  // langid
  auto* langid = app.add_subcommand("langid", "keep English documents");
  add_common(langid, common);
  add_stage_files(langid, files);
  std::optional<double> lang_threshold;
  bool lang_external = false;
  langid->add_option("--threshold", lang_threshold, "minimum confidence");
  langid->add_flag("--external", lang_external, "use lang/lang_conf already on the records");
  langid->callback([&] {
    auto cfg = settings(common);
    const auto counter = counter_for(cfg);
    if (lang_threshold) cfg.langid.threshold = *lang_threshold;
    if (lang_external) cfg.langid.external = true;
    auto out = langid_stage(read_documents(common.inputs), cfg.langid, *counter, cfg.workers);
    write_documents(out.docs, common.output);
    finish_stage(out.report, out.dropped, files);
  });

  // dedup-fuzzy
  auto* fuzzy = app.add_subcommand("dedup-fuzzy", "remove near-duplicate documents");
  add_common(fuzzy, common);
  add_stage_files(fuzzy, files);
  std::string clusters_path;
  fuzzy->add_option("--clusters", clusters_path, "write duplicate clusters as JSONL");
  fuzzy->callback([&] {
    auto cfg = settings(common);
    const auto counter = counter_for(cfg);
    cfg.fuzzy.validate();
    auto r = fuzzy_dedup(read_documents(common.inputs), cfg.fuzzy, *counter);
    write_documents(r.kept, common.output);
    if (!clusters_path.empty()) {
      std::vector<Json> lines;
      for (const auto& c : r.clusters) lines.push_back(c.to_json());
      write_json_lines(lines, clusters_path);
    }
    finish_stage(r.report, drops_from_ids(r.removed_ids, "dedup_fuzzy", "fuzzy_duplicate"), files);
  });

  // dedup-exact
  auto* exact = app.add_subcommand("dedup-exact", "remove repeated token spans");
  add_common(exact, common);
  add_stage_files(exact, files);
  std::optional<std::size_t> min_match;
  exact->add_option("--min-match", min_match, "minimum repeated span length in tokens");
  exact->callback([&] {
    auto cfg = settings(common);
    const auto counter = counter_for(cfg);
    if (min_match) cfg.exact.min_match_tokens = *min_match;
    cfg.exact.validate();
    auto r = exact_substring_dedup(read_documents(common.inputs), cfg.exact, *counter);
    write_documents(r.docs, common.output);
    finish_stage(r.report, drops_from_ids(r.dropped_ids, "dedup_exact", "exact_substring"), files);
  });

  // train-classifier
  auto* train = app.add_subcommand("train-classifier", "train a hashed n-gram quality classifier");
  add_common(train, common);
  std::string positive = "hq";
  NgramClassifierOptions train_opts;
  train->add_option("--positive", positive, "label of the high-quality class");
  train->add_option("--hash-bits", train_opts.hash_bits, "feature hash width in bits");
  train->add_option("--epochs", train_opts.epochs, "training epochs");
  train->add_option("--lr", train_opts.learning_rate, "learning rate");
  train->callback([&] {
    const auto cfg = settings(common);
    train_opts.seed = common.seed.value_or(train_opts.seed);
    std::vector<LabeledText> examples;
    for (const auto& j : read_json_inputs(common.inputs)) {
      if (!j.contains("text") || !j.contains("label")) throw Error("training records need text and label");
      examples.push_back({j["text"].get<std::string>(), j["label"].get<std::string>()});
    }
    try {
      train_opts.validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    auto model = NgramClassifier::train(examples, positive, train_opts);
    save_scorer_model(common.output, model);
    spdlog::info("trained on {} examples, {} nonzero weights", examples.size(), model.nonzero_weights());
  });

  // fit-head
  auto* head = app.add_subcommand("fit-head", "fit a linear regression head on embeddings");
  add_common(head, common);
  double lambda = 1e-6;
  std::string embedding_field = "embedding";
  std::string score_field = "score";
  head->add_option("--lambda", lambda, "ridge penalty");
  head->add_option("--embedding-field", embedding_field, "embedding key in each record");
  head->add_option("--score-field", score_field, "annotation key in each record");
  head->callback([&] {
    (void)settings(common);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (const auto& j : read_json_inputs(common.inputs)) {
      if (!j.contains(embedding_field) || !j.contains(score_field))
        throw Error("records need '" + embedding_field + "' and '" + score_field + "'");
      x.push_back(j[embedding_field].get<std::vector<double>>());
      y.push_back(j[score_field].get<double>());
    }
    auto model = RegressionHead::fit(x, y, lambda);
    save_scorer_model(common.output, model);
    spdlog::info("fitted head of dimension {} on {} examples", model.dim(), y.size());
  });

  // score
  auto* score = app.add_subcommand("score", "attach quality scores to documents");
  add_common(score, common);
  std::vector<std::string> score_models;
  std::vector<std::string> score_external;
  score->add_option("--scorer", score_models, "NAME=MODEL_PATH (repeatable; replaces configured scorers)");
  score->add_option("--external", score_external, "NAME of a score already on the records (repeatable)");
  score->callback([&] {
    const auto cfg = settings(common);
    std::vector<std::unique_ptr<Scorer>> scorers;
    if (score_models.empty() && score_external.empty()) {
      if (cfg.quality.scorers.empty()) throw ConfigError("no scorers: pass --scorer/--external or a config");
      for (const auto& spec : cfg.quality.scorers) scorers.push_back(make_scorer(spec));
    }
    for (const auto& s : score_models) {
      const auto [name, path] = split_assignment(s, "--scorer");
      if (!fs::exists(path)) throw ConfigError("model file does not exist: " + path);
      auto model = load_scorer_model(path);
      ScorerSpec spec;
      spec.name = name;
      spec.model_path = path;
      spec.kind = std::holds_alternative<NgramClassifier>(model) ? ScorerKind::NgramLinear : ScorerKind::RegressionHead;
      scorers.push_back(make_scorer(spec, std::move(model)));
    }
    for (const auto& name : score_external) {
      ScorerSpec spec;
      spec.name = name;
      scorers.push_back(make_scorer(spec));
    }
    auto docs = read_documents(common.inputs);
    score_documents(docs, scorers, cfg.workers);
    write_documents(docs, common.output);
  });

  // bucket
  auto* bucket = app.add_subcommand("bucket", "map scores to buckets and quality labels");
  add_common(bucket, common);
  std::string frozen_boundaries;
  std::string save_boundaries;
  std::vector<std::string> members;
  bucket->add_option("--boundaries", frozen_boundaries, "frozen thresholds (fitted on the input when absent)");
  bucket->add_option("--save-boundaries", save_boundaries, "write the thresholds used");
  bucket->add_option("--member", members, "ensemble member (repeatable; default: configured or all scores)");
  bucket->callback([&] {
    const auto cfg = settings(common);
    auto docs = read_documents(common.inputs);
    if (members.empty()) {
      for (const auto& s : cfg.quality.scorers)
        if (s.in_ensemble) members.push_back(s.name);
    }
    if (members.empty() && !docs.empty()) {
      for (const auto& [name, v] : docs.front().scores) members.push_back(name);
    }
    if (members.empty()) throw ConfigError("no ensemble members");
    BucketBoundaries b;
    if (!frozen_boundaries.empty()) {
      if (!fs::exists(frozen_boundaries)) throw ConfigError("boundaries file does not exist: " + frozen_boundaries);
      b = BucketBoundaries::load(frozen_boundaries);
    } else {
      std::map<std::string, std::vector<double>> scores;
      for (const auto& name : members) {
        auto& v = scores[name];
        for (const auto& d : docs) {
          const auto it = d.scores.find(name);
          if (it == d.scores.end()) throw Error("document " + d.id + " has no score '" + name + "'");
          v.push_back(it->second);
        }
      }
      b = BucketBoundaries::fit(scores);
    }
    for (auto& d : docs) assign_buckets(d, b, members);
    std::vector<int> finals;
    for (const auto& d : docs) finals.push_back(*d.final_bucket);
    spdlog::info("final buckets: {}", bucket_histogram(finals).to_json().dump());
    if (!save_boundaries.empty()) b.save(save_boundaries);
    write_documents(docs, common.output);
  });

  // filter
  auto* filter = app.add_subcommand("filter", "apply heuristic and perplexity filters");
  add_common(filter, common);
  add_stage_files(filter, files);
  std::string lm_path;
  std::optional<double> ppl_threshold;
  bool no_heuristics = false;
  filter->add_option("--lm", lm_path, "n-gram LM for the perplexity filter");
  filter->add_option("--ppl-threshold", ppl_threshold, "drop documents above this perplexity");
  filter->add_flag("--no-heuristics", no_heuristics, "only apply the perplexity filter");
  filter->callback([&] {
    const auto cfg = settings(common);
    const auto counter = counter_for(cfg);
    if (!lm_path.empty() && !ppl_threshold) throw ConfigError("--lm needs --ppl-threshold");
    if (no_heuristics && lm_path.empty()) throw ConfigError("nothing to do: --no-heuristics without --lm");
    auto docs = read_documents(common.inputs);
    std::vector<DroppedDocument> dropped;
    Json reports = Json::array();
    if (!no_heuristics) {
      auto r = filter_documents(std::move(docs), cfg.ruleset(), *counter, cfg.workers);
      docs = std::move(r.kept);
      dropped = std::move(r.dropped);
      finish_stage(r.report, {}, {});
      reports.push_back(r.report.to_json());
    }
    if (!lm_path.empty()) {
      if (!fs::exists(lm_path)) throw ConfigError("LM file does not exist: " + lm_path);
      const auto lm = NgramLm::load(lm_path);
      auto r = perplexity_filter_documents(std::move(docs), lm, *ppl_threshold, *counter, cfg.workers);
      docs = std::move(r.kept);
      for (auto& d : r.dropped) dropped.push_back(std::move(d));
      finish_stage(r.report, {}, {});
      reports.push_back(r.report.to_json());
    }
    write_documents(docs, common.output);
    if (!files.report.empty()) write_json_file(reports, files.report);
    if (!files.drops.empty()) {
      std::vector<Json> lines;
      for (const auto& d : dropped) lines.push_back(dropped_to_json(d));
      write_json_lines(lines, files.drops);
    }
  });

  // sdg-chunk
  auto* chunk = app.add_subcommand("sdg-chunk", "split labelled documents into generation jobs");
  add_common(chunk, common);
  std::vector<std::string> chunk_kinds;
  chunk->add_option("--kind", chunk_kinds, "restrict to prompt kind(s)");
  chunk->callback([&] {
    auto cfg = settings(common);
    const auto counter = counter_for(cfg);
    if (!chunk_kinds.empty()) {
      cfg.sdg.kinds.clear();
      for (const auto& k : chunk_kinds) {
        const auto kind = parse_prompt_kind(k);
        if (!kind) throw ConfigError("unknown prompt kind " + k);
        cfg.sdg.kinds.push_back(*kind);
      }
    }
    const auto docs = read_documents(common.inputs);
    SdgReport report;
    const auto jobs = plan_segments(docs, cfg.sdg, *counter, report);
    std::vector<Json> lines;
    for (const auto& j : jobs) lines.push_back(j.to_json());
    write_json_lines(lines, common.output);
    spdlog::info("sdg-chunk: {}", report.to_json().dump());
  });

  // sdg-generate
  auto* generate = app.add_subcommand("sdg-generate", "send generation jobs to a chat endpoint");
  add_common(generate, common);
  std::string endpoint_url;
  generate->add_option("--endpoint", endpoint_url, "chat endpoint base URL (overrides the config)");
  generate->callback([&] {
    auto cfg = settings(common);
    if (!endpoint_url.empty()) cfg.endpoint.base_url = endpoint_url;
    try {
      cfg.endpoint.validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    std::vector<SegmentJob> jobs;
    for (const auto& j : read_json_inputs(common.inputs)) jobs.push_back(SegmentJob::from_json(j));
    ChatClient client(cfg.endpoint);
    SdgReport report;
    const auto raw = run_generation(jobs, client.as_generator(), cfg.sdg, report);
    std::vector<Json> lines;
    for (const auto& r : raw) lines.push_back(r.to_json());
    write_json_lines(lines, common.output);
    for (const auto& e : report.errors) spdlog::warn("{}", e);
  });

  // sdg-post
  auto* post = app.add_subcommand("sdg-post", "post-process raw generations into synthetic documents");
  add_common(post, common);
  post->callback([&] {
    const auto cfg = settings(common);
    const auto counter = counter_for(cfg);
    std::vector<RawGeneration> raw;
    for (const auto& j : read_json_inputs(common.inputs)) raw.push_back(RawGeneration::from_json(j));
    SdgReport report;
    const auto records = assemble_records(raw, cfg.sdg, *counter, report);
    std::vector<Document> docs;
    for (const auto& r : records) docs.push_back(r.to_document());
    write_documents(docs, common.output);
    spdlog::info("sdg-post: {}", report.to_json().dump());
  });

  // run
  auto* run = app.add_subcommand("run", "run the whole pipeline");
  Common run_opts;
  run->add_option("--config", run_opts.config, "configuration file")->required();
  run->add_option("--input", run_opts.inputs, "input file(s) (override the config)");
  run->add_option("--output", run_opts.output, "output directory (overrides the config)");
  run->add_option("--seed", run_opts.seed, "random seed (overrides the config)");
  run->add_option("--workers", run_opts.workers, "worker threads (overrides the config)");
  run->callback([&] {
    auto cfg = settings(run_opts);
    if (!run_opts.inputs.empty()) {
      cfg.input.paths.clear();
      for (const auto& p : run_opts.inputs) cfg.input.paths.emplace_back(p);
    }
    if (!run_opts.output.empty()) cfg.output_dir = run_opts.output;
    const auto r = run_pipeline(cfg);
    spdlog::info("run: {} real and {} synthetic documents in {} partitions, {} dropped", r.real_docs,
                 r.synthetic_docs, r.partitions.size(), r.dropped.size());
  });

  // stats
  auto* stats = app.add_subcommand("stats", "per-label and per-kind token statistics of a dataset");
  Common stats_opts;
  bool stats_json = false;
  stats->add_option("--config", stats_opts.config, "configuration file (tokenizer)");
  stats->add_option("--input", stats_opts.inputs, "dataset directory")->required()->expected(1);
  stats->add_option("--output", stats_opts.output, "write the report as JSON");
  stats->add_flag("--json", stats_json, "print JSON instead of tables");
  stats->callback([&] {
    const auto cfg = settings(stats_opts);
    const auto counter = counter_for(cfg);
    const fs::path dir = stats_opts.inputs.front();
    if (!fs::is_directory(dir)) throw ConfigError("dataset directory does not exist: " + dir.string());
    const auto s = dataset_stats(dir, *counter);
    if (!stats_opts.output.empty()) write_json_file(s.to_json(), stats_opts.output);
    std::cout << (stats_json ? s.to_json().dump(2) + "\n" : s.to_text());
  });

  // domain-overlap
  auto* overlap = app.add_subcommand("domain-overlap", "compare the high-quality sets of two scorers by domain");
  add_common(overlap, common, false);
  std::string scorer_a;
  std::string scorer_b;
  int min_bucket = kBucketCount - 1;
  std::size_t top_k = 10;
  overlap->add_option("--scorer-a", scorer_a, "first scorer")->required();
  overlap->add_option("--scorer-b", scorer_b, "second scorer")->required();
  overlap->add_option("--min-bucket", min_bucket, "bucket a document must reach to count as high quality");
  overlap->add_option("--top-k", top_k, "domains compared per scorer");
  overlap->callback([&] {
    (void)settings(common);
    const auto docs = read_documents(common.inputs);
    std::vector<Document> a;
    std::vector<Document> b;
    for (const auto& d : docs) {
      const auto ia = d.buckets.find(scorer_a);
      const auto ib = d.buckets.find(scorer_b);
      if (ia == d.buckets.end() || ib == d.buckets.end())
        throw Error("document " + d.id + " lacks buckets for both scorers");
      if (ia->second >= min_bucket) a.push_back(d);
      if (ib->second >= min_bucket) b.push_back(d);
    }
    const auto report = domain_overlap_report(a, b, top_k);
    if (!common.output.empty()) write_json_file(report.to_json(), common.output);
    std::cout << report.to_text(scorer_a, scorer_b);
  });

  // default-config
  auto* defaults = app.add_subcommand("default-config", "print a commented configuration with every default");
  defaults->callback([] { std::cout << default_config_text(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return print_usage_error(app, e);
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
