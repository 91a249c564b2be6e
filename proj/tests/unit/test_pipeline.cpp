#include <doctest.h>

#include <cstdlib>
#include <set>
#include <sys/wait.h>

#include "curate/core/error.hpp"
#include "curate/core/record_io.hpp"
#include "curate/pipeline/config.hpp"
#include "curate/pipeline/pipeline.hpp"
#include "curate/pipeline/stats.hpp"
#include "curate/sdg/stub_server.hpp"
#include "fixtures.hpp"

using namespace curate;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CURATE_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> drop_rules(const fs::path& drops) {
  std::map<std::string, std::string> out;
  for (const auto& j : read_json_lines(drops)) out[j["id"]] = j["rule"];
  return out;
}

std::vector<Document> read_partitions(const fs::path& out) {
  std::vector<Document> docs;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (e.path().string().ends_with(".jsonl.gz")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    for (auto& d : read_records(f, RecordFormat::JsonlGz)) docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace

TEST_CASE("config parsing with comments and relative paths") {
  test::TempDir dir;
  const auto j = parse_config_text(R"(// leading
  {
    "input": {"paths": ["data/a.jsonl"]},  /* inline */
    "output": "out",
    "workers": 3,
    "url": "http://x//y"
  })");
  CHECK(j["url"] == "http://x//y");
  Json cfg = j;
  cfg.erase("url");
  const auto c = PipelineConfig::from_json(cfg, dir.path());
  CHECK(c.input.paths.at(0) == dir.path() / "data/a.jsonl");
  CHECK(c.output_dir == dir.path() / "out");
  CHECK(c.workers == 3);
  CHECK_THROWS_AS(PipelineConfig::from_json(j, dir.path()), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json(Json{{"stages", {{"sdgg", false}}}}, dir.path()), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  test::write_file(dir / "bad.json", "{ not json");
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
}

TEST_CASE("the default configuration text is a valid configuration") {
  const auto j = parse_config_text(default_config_text());
  test::TempDir dir;
  CHECK_NOTHROW(PipelineConfig::from_json(j, dir.path()));
}

TEST_CASE("stats report label shares and synthetic cells") {
  WhitespaceCounter counter;
  std::vector<Document> docs;
  auto add = [&](QualityLabel l, std::size_t tokens, std::optional<PromptKind> kind = std::nullopt) {
    Document d;
    d.id = "d" + std::to_string(docs.size());
    d.label = l;
    d.synthetic_kind = kind;
    for (std::size_t i = 0; i < tokens; ++i) d.text += "w ";
    docs.push_back(d);
  };
  add(QualityLabel::High, 30);
  add(QualityLabel::High, 10);
  add(QualityLabel::Low, 60);
  add(QualityLabel::High, 99, PromptKind::Distill);
  const auto s = compute_stats(docs, counter);
  REQUIRE(s.labels.size() == 5);
  CHECK(s.labels[0].label == QualityLabel::High);
  CHECK(s.labels[0].tokens == 40);
  CHECK(s.labels[0].percent == doctest::Approx(40.0));
  CHECK(s.labels[4].percent == doctest::Approx(60.0));
  double total = 0;
  for (const auto& r : s.labels) total += r.percent;
  CHECK(total == doctest::Approx(100.0));
  CHECK(s.real_docs == 3);
  CHECK(s.real_tokens == 100);
  REQUIRE(s.synthetic.size() == 1);
  CHECK(s.synthetic[0].tokens == 99);
  CHECK(s.to_text().find("Medium-High") != std::string::npos);

  const auto empty = compute_stats({}, counter);
  for (const auto& r : empty.labels) CHECK(r.percent == 0.0);
}

TEST_CASE("smoke pipeline routes every document as planned") {
  const auto corpus = test::make_smoke_corpus();
  StubLlmServer server;
  test::TempDir dir;
  const auto config_path = test::write_smoke_workspace(dir.path(), corpus, server.base_url());
  const auto config = load_config(config_path);
  const auto result = run_pipeline(config);
  const auto out = config.output_dir;

  const auto& r = result.reports;
  CHECK(r["routing_complete"] == true);
  CHECK(r["token_flow"]["balanced"] == true);
  CHECK(r["input"]["documents"] == corpus.docs.size());
  for (const auto& s : result.stages) {
    INFO(s.stage);
    CHECK(s.reconciles());
  }

  const auto drops = drop_rules(out / "reports" / "drops.jsonl");
  std::map<std::string, std::size_t> drop_counts;
  for (const auto& [id, rule] : drops) ++drop_counts[rule];
  CHECK(drop_counts == corpus.expected_drop_counts());

  const auto docs = read_partitions(out);
  std::map<QualityLabel, std::size_t> real;
  std::set<std::string> real_ids;
  for (const auto& d : docs) {
    INFO(d.id);
    REQUIRE(d.label.has_value());
    if (d.synthetic_kind) continue;
    CHECK(check_invariants(d) == "");
    ++real[*d.label];
    real_ids.insert(d.id);
  }
  CHECK(real == corpus.expected_real_counts());
  for (const auto& [id, fate] : corpus.fate) {
    INFO(id);
    if (fate.kept) {
      CHECK(real_ids.count(id) == 1);
    } else {
      REQUIRE(drops.count(id) == 1);
      CHECK(drops.at(id) == fate.drop_rule);
    }
  }
  CHECK(real_ids.count(corpus.lorem_high_id) == 1);
  CHECK(drops.at(corpus.lorem_low_id) == "c4_lorem_ipsum");

  std::set<std::string> synthetic_labels;
  for (const auto& d : docs) {
    if (d.synthetic_kind) synthetic_labels.insert(std::string(label_name(*d.label)));
  }
  CHECK(synthetic_labels == std::set<std::string>{"high", "low", "medium_high"});
  CHECK(result.synthetic_docs > 0);
  CHECK(server.calls() > 0);
  for (const char* f : {"reports.json", "reports.txt", "drops.jsonl", "clusters.jsonl", "boundaries.json"})
    CHECK(fs::exists(out / "reports" / f));

  const auto stats = dataset_stats(out, WhitespaceCounter());
  CHECK(stats.real_docs == result.real_docs);
  REQUIRE(stats.dedup.has_value());
  CHECK(stats.dedup->total_docs > stats.dedup->unique_docs);
}

TEST_CASE("worker count does not change the output") {
  const auto corpus = test::make_smoke_corpus(99);
  StubLlmServer server;
  test::TempDir a, b;
  const auto ca = load_config(test::write_smoke_workspace(a.path(), corpus, server.base_url(), 1));
  const auto cb = load_config(test::write_smoke_workspace(b.path(), corpus, server.base_url(), 4));
  const auto ra = run_pipeline(ca);
  const auto rb = run_pipeline(cb);
  CHECK(ra.partitions == rb.partitions);
  for (const auto& [rel, n] : ra.partitions) {
    INFO(rel);
    CHECK(test::read_file(ca.output_dir / rel) == test::read_file(cb.output_dir / rel));
  }
  CHECK(test::read_file(ca.output_dir / "reports" / "drops.jsonl") ==
        test::read_file(cb.output_dir / "reports" / "drops.jsonl"));
}

TEST_CASE("the pipeline fails cleanly without an endpoint") {
  const auto corpus = test::make_smoke_corpus();
  test::TempDir dir;
  const auto config = load_config(test::write_smoke_workspace(dir.path(), corpus, "http://127.0.0.1:9/v1"));
  const auto result = run_pipeline(config);
  CHECK(result.synthetic_docs == 0);
  CHECK_FALSE(result.reports["sdg"]["errors"].empty());
  CHECK(result.reports["routing_complete"] == true);
}

TEST_CASE("CLI exit codes") {
  test::TempDir dir;
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("no-such-command") == 2);
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("run --config " + (dir / "missing.json").string()) == 2);
  test::write_file(dir / "unknown.json", R"({"bogus": 1})");
  CHECK(run_cli("run --config " + (dir / "unknown.json").string()) == 2);
  CHECK(run_cli("stats --input " + (dir / "nope").string()) == 2);
  CHECK(run_cli("stats --input " + dir.path().string()) == 0);
  CHECK(run_cli("default-config") == 0);

  std::mt19937_64 rng(41);
  std::vector<Document> docs(3);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    docs[i].id = "d" + std::to_string(i);
    docs[i].text = test::english_text(rng, 4);
  }
  docs[2].text = docs[0].text;
  write_records(docs, dir / "in.jsonl", RecordFormat::Jsonl);
  CHECK(run_cli("dedup-fuzzy --input " + (dir / "in.jsonl").string() + " --output " + (dir / "dd.jsonl").string()) ==
        0);
  CHECK(read_records(dir / "dd.jsonl", RecordFormat::Jsonl).size() == 2);
  CHECK(run_cli("langid --input " + (dir / "in.jsonl").string() + " --output " + (dir / "li.jsonl").string()) == 0);
  CHECK(read_records(dir / "li.jsonl", RecordFormat::Jsonl).size() == 3);
  CHECK(run_cli("score --external edu --input " + (dir / "in.jsonl").string() + " --output " +
                (dir / "sc.jsonl").string()) == 1);
}
