#include "curate/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "curate/core/error.hpp"

namespace curate {

namespace {

void check_keys(const Json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(section) + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("unknown key '" + k + "' in " + std::string(section));
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, std::string_view section) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string(section) + "." + key + " has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<std::filesystem::path> read_path(const Json& j, const char* key, const std::filesystem::path& base,
                                               std::string_view section) {
  std::string s;
  read(j, key, s, section);
  if (s.empty()) return std::nullopt;
  return resolve(base, s);
}

}  // namespace

Json parse_config_text(std::string_view text) {
  try {
    return Json::parse(text, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

PipelineConfig PipelineConfig::from_json(const Json& j, const std::filesystem::path& base) {
  check_keys(j, "config", {"input", "output", "seed", "workers", "shard_count", "tokenizer", "stages", "extraction",
                           "langid", "dedup_fuzzy", "dedup_exact", "quality", "heuristics", "perplexity", "sdg",
                           "endpoint"});
  PipelineConfig c;
  if (j.contains("input")) {
    const auto& in = j["input"];
    check_keys(in, "input", {"paths", "format", "default_snapshot"});
    std::vector<std::string> paths;
    read(in, "paths", paths, "input");
    for (const auto& p : paths) c.input.paths.push_back(resolve(base, p));
    std::string fmt;
    read(in, "format", fmt, "input");
    if (!fmt.empty() && fmt != "auto") {
      try {
        c.input.format = parse_record_format(fmt);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    read(in, "default_snapshot", c.input.default_snapshot, "input");
  }
  if (auto out = read_path(j, "output", base, "config")) c.output_dir = *out;
  read(j, "seed", c.seed, "config");
  read(j, "workers", c.workers, "config");
  read(j, "shard_count", c.shard_count, "config");
  read(j, "tokenizer", c.tokenizer, "config");
  if (c.tokenizer.starts_with("bpe:")) c.tokenizer = "bpe:" + resolve(base, c.tokenizer.substr(4)).string();
  if (j.contains("stages")) {
    const auto& s = j["stages"];
    check_keys(s, "stages", {"extract", "langid", "dedup_fuzzy", "dedup_exact", "heuristics", "perplexity", "sdg"});
    read(s, "extract", c.stages.extract, "stages");
    read(s, "langid", c.stages.langid, "stages");
    read(s, "dedup_fuzzy", c.stages.dedup_fuzzy, "stages");
    read(s, "dedup_exact", c.stages.dedup_exact, "stages");
    read(s, "heuristics", c.stages.heuristics, "stages");
    read(s, "perplexity", c.stages.perplexity, "stages");
    read(s, "sdg", c.stages.sdg, "stages");
  }
  if (j.contains("extraction")) {
    const auto& e = j["extraction"];
    check_keys(e, "extraction",
               {"length_low", "length_high", "stopwords_low", "stopwords_high", "max_link_density", "stopwords"});
    read(e, "length_low", c.extraction.length_low, "extraction");
    read(e, "length_high", c.extraction.length_high, "extraction");
    read(e, "stopwords_low", c.extraction.stopwords_low, "extraction");
    read(e, "stopwords_high", c.extraction.stopwords_high, "extraction");
    read(e, "max_link_density", c.extraction.max_link_density, "extraction");
    c.stopwords = read_path(e, "stopwords", base, "extraction");
  }
  if (j.contains("langid")) {
    const auto& l = j["langid"];
    check_keys(l, "langid", {"mode", "threshold"});
    std::string mode = "native";
    read(l, "mode", mode, "langid");
    if (mode != "native" && mode != "external") throw ConfigError("langid.mode must be native or external");
    c.langid.external = mode == "external";
    read(l, "threshold", c.langid.threshold, "langid");
  }
  if (j.contains("dedup_fuzzy")) {
    const auto& f = j["dedup_fuzzy"];
    check_keys(f, "dedup_fuzzy", {"shingle_size", "signature_size", "bands", "rows", "threshold", "seed"});
    read(f, "shingle_size", c.fuzzy.shingle_size, "dedup_fuzzy");
    read(f, "signature_size", c.fuzzy.k, "dedup_fuzzy");
    read(f, "bands", c.fuzzy.bands, "dedup_fuzzy");
    read(f, "rows", c.fuzzy.rows, "dedup_fuzzy");
    read(f, "threshold", c.fuzzy.threshold, "dedup_fuzzy");
    read(f, "seed", c.fuzzy.seed, "dedup_fuzzy");
  }
  if (j.contains("dedup_exact")) {
    const auto& e = j["dedup_exact"];
    check_keys(e, "dedup_exact", {"min_match_tokens"});
    read(e, "min_match_tokens", c.exact.min_match_tokens, "dedup_exact");
  }
  if (j.contains("quality")) {
    const auto& q = j["quality"];
    check_keys(q, "quality", {"scorers", "boundaries"});
    if (q.contains("scorers")) {
      if (!q["scorers"].is_array()) throw ConfigError("quality.scorers must be an array");
      for (const auto& s : q["scorers"]) {
        check_keys(s, "quality.scorers[]", {"name", "kind", "model", "embedding_field", "in_ensemble"});
        auto spec = ScorerSpec::from_json(s);
        if (!spec.model_path.empty()) spec.model_path = resolve(base, spec.model_path).string();
        c.quality.scorers.push_back(std::move(spec));
      }
    }
    c.quality.boundaries = read_path(q, "boundaries", base, "quality");
  }
  if (j.contains("heuristics")) {
    const auto& h = j["heuristics"];
    check_keys(h, "heuristics", {"rules"});
    if (h.contains("rules")) c.rules = h["rules"];
  }
  if (j.contains("perplexity")) {
    const auto& p = j["perplexity"];
    check_keys(p, "perplexity", {"model", "train_corpus", "order", "threshold", "quantile", "holdout_every"});
    c.perplexity.model = read_path(p, "model", base, "perplexity");
    c.perplexity.train_corpus = read_path(p, "train_corpus", base, "perplexity");
    read(p, "order", c.perplexity.order, "perplexity");
    if (p.contains("threshold") && !p["threshold"].is_null()) {
      double t = 0;
      read(p, "threshold", t, "perplexity");
      c.perplexity.threshold = t;
    }
    read(p, "quantile", c.perplexity.quantile, "perplexity");
    read(p, "holdout_every", c.perplexity.holdout_every, "perplexity");
  }
  if (j.contains("sdg")) {
    const auto& s = j["sdg"];
    check_keys(s, "sdg", {"medium_high_as_high", "kinds", "min_tokens", "qa_tokens_per_pair", "qa_max_pairs",
                          "temperature", "top_p", "max_tokens"});
    c.sdg = SdgOptions::from_json(s);
  }
  if (j.contains("endpoint")) {
    const auto& e = j["endpoint"];
    check_keys(e, "endpoint", {"base_url", "model", "api_key_env", "timeout_seconds", "max_attempts",
                               "backoff_base_seconds", "backoff_factor", "max_in_flight"});
    try {
      c.endpoint = ChatClientOptions::from_json(e);
    } catch (const Json::exception&) {
      throw ConfigError("endpoint section has a value of the wrong type");
    }
  }
  c.sdg.model = c.endpoint.model;
  c.sdg.seed = c.seed;
  c.fuzzy.workers = c.workers;
  c.exact.workers = c.workers;
  c.exact.shard_count = c.shard_count;
  return c;
}

void PipelineConfig::validate() const {
  if (input.paths.empty()) throw ConfigError("input.paths is empty");
  for (const auto& p : input.paths) {
    if (!std::filesystem::exists(p)) throw ConfigError("input file does not exist: " + p.string());
  }
  if (output_dir.empty()) throw ConfigError("output directory is not set");
  if (workers == 0) throw ConfigError("workers must be >= 1");
  if (shard_count == 0) throw ConfigError("shard_count must be >= 1");
  try {
    extraction.validate();
    fuzzy.validate();
    exact.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(langid.threshold >= 0 && langid.threshold <= 1)) throw ConfigError("langid.threshold must be in [0, 1]");
  if (quality.scorers.empty()) throw ConfigError("quality.scorers is empty");
  std::set<std::string> names;
  bool any_member = false;
  for (const auto& s : quality.scorers) {
    if (!names.insert(s.name).second) throw ConfigError("duplicate scorer name " + s.name);
    if (!s.model_path.empty() && !std::filesystem::exists(s.model_path))
      throw ConfigError("scorer model does not exist: " + s.model_path);
    any_member = any_member || s.in_ensemble;
  }
  if (!any_member) throw ConfigError("no scorer is marked in_ensemble");
  if (quality.boundaries && !std::filesystem::exists(*quality.boundaries))
    throw ConfigError("boundaries file does not exist: " + quality.boundaries->string());
  if (stages.perplexity) {
    if (!perplexity.model && !perplexity.train_corpus)
      throw ConfigError("perplexity stage needs perplexity.model or perplexity.train_corpus");
    if (perplexity.model && !perplexity.threshold)
      throw ConfigError("perplexity.threshold is required with a pre-trained model");
    for (const auto& p : {perplexity.model, perplexity.train_corpus}) {
      if (p && !std::filesystem::exists(*p)) throw ConfigError("perplexity file does not exist: " + p->string());
    }
    if (perplexity.threshold && !(*perplexity.threshold > 0)) throw ConfigError("perplexity.threshold must be > 0");
    if (perplexity.order < 1 || perplexity.order > 5) throw ConfigError("perplexity.order must be in [1, 5]");
  }
  if (stopwords && !std::filesystem::exists(*stopwords))
    throw ConfigError("stopword list does not exist: " + stopwords->string());
  (void)ruleset();
}

Ruleset PipelineConfig::ruleset() const {
  if (rules.is_null()) return default_ruleset();
  auto r = ruleset_from_json(rules);
  if (r.empty()) throw ConfigError("heuristics.rules enables no rule");
  return r;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  auto c = PipelineConfig::from_json(parse_config_text(ss.str()), path.parent_path());
  c.config_path = path;
  return c;
}

std::string_view default_config_text() {
  return R"cfg(// curate pipeline configuration. JSON with // and /* */ comments.
// Relative paths resolve against the directory of this file.
{
  "input": {
    "paths": ["crawl/CC-MAIN-2024-10-part0.warc.gz"],
    "format": "auto",            // auto | jsonl | jsonl.gz | warc | wet
    "default_snapshot": ""        // used when the path carries no CC-MAIN-YYYY-WW
  },
  "output": "out",
  "seed": 0,
  "workers": 1,                   // never changes outputs
  "shard_count": 8,               // exact-dedup shards and output partitions
  "tokenizer": "whitespace",      // or "bpe:<merges file>"
  "stages": {
    "extract": true, "langid": true, "dedup_fuzzy": true, "dedup_exact": true,
    "heuristics": true, "perplexity": true, "sdg": true
  },
  "extraction": {
    "length_low": 70, "length_high": 200,
    "stopwords_low": 0.30, "stopwords_high": 0.32,
    "max_link_density": 0.2
    // "stopwords": "stopwords.txt"
  },
  "langid": { "mode": "native", "threshold": 0.3 },   // mode: native | external
  "dedup_fuzzy": {
    "shingle_size": 13, "signature_size": 128, "bands": 16, "rows": 8,
    "threshold": 0.8, "seed": 30796695379997544
  },
  "dedup_exact": { "min_match_tokens": 50 },
  "quality": {
    "scorers": [
      { "name": "edu_a", "kind": "regression_head", "model": "models/edu_a.nqls", "embedding_field": "embedding" },
      { "name": "edu_b", "kind": "regression_head", "model": "models/edu_b.nqls", "embedding_field": "embedding" },
      { "name": "ngram", "kind": "ngram_linear", "model": "models/ngram.nqls" }
      // { "name": "other", "kind": "external_scores", "in_ensemble": false }
    ]
    // "boundaries": "boundaries.json"   frozen thresholds; fitted on this run when absent
  },
  "heuristics": {
    // omit "rules" to enable every rule with its defaults
    "rules": [
      { "name": "c4_terminal_punct" },
      { "name": "c4_min_words_per_line", "params": { "min_words": 5 } },
      { "name": "c4_javascript" },
      { "name": "c4_lorem_ipsum" },
      { "name": "c4_curly_bracket" },
      { "name": "c4_min_sentences", "params": { "min_sentences": 3 } },
      { "name": "gopher_word_count", "params": { "min_words": 50, "max_words": 100000 } },
      { "name": "gopher_mean_word_length", "params": { "min_length": 3, "max_length": 10 } },
      { "name": "gopher_symbol_ratio", "params": { "max_ratio": 0.1 } },
      { "name": "gopher_alpha_words", "params": { "min_fraction": 0.8 } },
      { "name": "gopher_bullet_lines", "params": { "max_fraction": 0.9 } },
      { "name": "gopher_ellipsis_lines", "params": { "max_fraction": 0.3 } },
      { "name": "gopher_stop_words", "params": { "min_count": 2 } }
    ]
  },
  "perplexity": {
    "train_corpus": "reference/wiki_books.jsonl",
    // "model": "lm.nglm", "threshold": 1200.0,
    "order": 5,
    "quantile": 0.9,          // threshold = this quantile of held-out perplexities
    "holdout_every": 10       // every 10th training text is held out
  },
  "sdg": {
    "medium_high_as_high": true,
    "kinds": ["wikipedia", "diverse_qa", "distill", "extract_knowledge", "knowledge_list"],
    "min_tokens": 50,
    "qa_tokens_per_pair": 150, "qa_max_pairs": 8,
    "temperature": 0.5, "top_p": 0.9, "max_tokens": 1024
  },
  "endpoint": {
    "base_url": "http://127.0.0.1:8000/v1",
    "model": "generator",
    "api_key_env": "CURATE_API_KEY",
    "timeout_seconds": 120,
    "max_attempts": 5, "backoff_base_seconds": 1.0, "backoff_factor": 2.0,
    "max_in_flight": 4
  }
}
)cfg";
}

}  // namespace curate
