#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "curate/core/record_io.hpp"

namespace curate::test {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCommonWords = {
    "the",      "of",       "and",      "to",       "in",       "is",       "that",     "for",      "it",
    "with",     "as",       "was",      "on",       "be",       "by",       "this",     "are",      "from",
    "at",       "or",       "have",     "an",       "they",     "which",    "one",      "you",      "were",
    "all",      "we",       "their",    "can",      "there",    "been",     "has",      "more",     "when",
    "will",     "would",    "who",      "so",       "people",   "water",    "history",  "world",    "school",
    "student",  "teacher",  "science",  "energy",   "river",    "mountain", "city",     "village",  "family",
    "garden",   "market",   "language", "music",    "library",  "research", "history",  "animal",   "forest",
    "weather",  "island",   "country",  "government", "museum", "children", "problem",  "question", "answer",
    "example",  "number",   "system",   "program",  "course",   "lesson",   "chapter",  "story",    "paper",
    "method",   "result",   "process",  "question", "morning",  "evening",  "summer",   "winter",   "spring",
    "bridge",   "road",     "train",    "house",    "window",   "kitchen",  "doctor",   "hospital", "health",
    "because",  "through",  "between",  "during",   "without",  "before",   "after",    "under",    "often",
    "usually",  "really",   "always",   "simple",   "important", "different", "several", "early",   "small",
    "large",    "young",    "local",    "public",   "natural",  "careful",  "useful",   "explain",  "describe",
    "build",    "learn",    "teach",    "write",    "read",     "study",    "grow",     "carry",    "bring",
    "follow",   "change",   "measure",  "compare",  "discover", "improve",  "produce",  "protect",  "travel",
    "visit",    "remember", "believe",  "understand", "provide", "include", "continue", "develop",  "support"};

// English words absent from kCommonWords; text made of them is unseen by
// the smoke language model.
const std::vector<std::string> kRareWords = {
    "quartz",    "lantern",   "pelican",  "saffron",  "tundra",    "glacier",   "obsidian", "marigold",
    "harpoon",   "sextant",   "walnut",   "juniper",  "falcon",    "chisel",    "lagoon",   "meadow",
    "pewter",    "thistle",   "cobalt",   "anchor",   "bramble",   "cinnamon",  "dune",     "ember",
    "fjord",     "granite",   "heron",    "ivory",    "jasmine",   "kettle",    "lichen",   "mosaic",
    "nectar",    "orchard",   "parchment", "quiver",  "raven",     "sapphire",  "tapestry", "umbrella",
    "velvet",    "willow",    "yarrow",   "zephyr",   "amber",     "beacon",    "canyon",   "dolphin",
    "emerald",   "feather",   "gondola",  "hammock",  "igloo",     "jigsaw",    "kayak",    "lobster",
    "mandolin",  "nutmeg",    "oyster",   "porcelain", "quill",    "rhubarb",   "scarlet",  "trumpet",
    "upholstery", "vineyard", "walrus",   "yodel",    "zinnia",    "acorn",     "badger",   "cactus",
    "driftwood", "eclipse",   "flannel",  "gazebo",   "hazelnut",  "inkwell",   "jackal",   "kiln",
    "lighthouse", "mussel",   "nightingale", "otter", "pinecone",  "quarry",    "reindeer", "sandstone",
    "toboggan",  "urchin",    "vulture",  "wigwam",   "xylophone", "yak",       "zucchini", "bassoon"};

const std::vector<std::string> kFrenchWords = {
    "le",       "la",      "les",      "de",        "des",       "et",       "est",      "une",
    "dans",     "pour",    "avec",     "que",       "qui",       "sur",      "nous",     "vous",
    "elle",     "ils",     "sont",     "mais",      "comme",     "aussi",    "toujours", "jamais",
    "maison",   "enfant",  "ville",    "pays",      "travail",   "histoire", "monde",    "temps",
    "jour",     "année",   "école",    "livre",     "musique",   "rivière",  "montagne", "famille",
    "gouvernement", "peuple", "question", "réponse", "exemple",  "beaucoup", "très",     "plusieurs",
    "pourquoi", "parce",   "depuis",   "pendant",   "après",     "avant",    "chaque",   "notre",
    "leur",     "cette",   "ces",      "faire",     "prendre",   "comprendre", "apprendre", "écrire"};

std::string make_sentence(std::mt19937_64& rng, const std::vector<std::string>& words) {
  std::uniform_int_distribution<std::size_t> len(8, 14);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  const std::size_t n = len(rng);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w = words[pick(rng)];
    if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    if (i) s += ' ';
    s += w;
  }
  return s + ".";
}

std::string make_text(std::mt19937_64& rng, const std::vector<std::string>& words, std::size_t lines,
                      std::size_t sentences_per_line) {
  std::string out;
  for (std::size_t l = 0; l < lines; ++l) {
    if (l) out += '\n';
    for (std::size_t s = 0; s < sentences_per_line; ++s) {
      if (s) out += ' ';
      out += make_sentence(rng, words);
    }
  }
  return out;
}

std::string padded(std::size_t i) {
  auto s = std::to_string(i);
  return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

}  // namespace

TempDir::TempDir(const std::string& prefix) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto name = prefix + "-" + std::to_string(rd()) + "-" + std::to_string(counter++);
    path_ = fs::temp_directory_path() / name;
    if (fs::create_directory(path_)) return;
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string english_text(std::mt19937_64& rng, std::size_t lines, std::size_t sentences_per_line) {
  return make_text(rng, kCommonWords, lines, sentences_per_line);
}

std::string french_text(std::mt19937_64& rng, std::size_t lines) { return make_text(rng, kFrenchWords, lines, 2); }

std::string gibberish_text(std::mt19937_64& rng, std::size_t lines) {
  auto words = kRareWords;
  for (const char* stop : {"the", "and", "of", "with"}) words.emplace_back(stop);
  return make_text(rng, words, lines, 2);
}

double score_for_bucket(int bucket) { return 0.05 * bucket + 0.025; }

Json uniform_boundaries_json(const std::vector<std::string>& scorers) {
  std::vector<double> t;
  for (int i = 1; i < kBucketCount; ++i) t.push_back(0.05 * i);
  Json j = Json::object();
  for (const auto& s : scorers) j[s] = t;
  return j;
}

std::map<QualityLabel, std::size_t> SmokeCorpus::expected_real_counts() const {
  std::map<QualityLabel, std::size_t> out;
  for (auto l : kAllLabels) out[l] = 0;
  for (const auto& [id, f] : fate) {
    if (f.kept) ++out[*f.label];
  }
  return out;
}

std::map<std::string, std::size_t> SmokeCorpus::expected_drop_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& [id, f] : fate) {
    if (!f.kept) ++out[f.drop_rule];
  }
  return out;
}

SmokeCorpus make_smoke_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SmokeCorpus c;
  std::mt19937_64 boiler_rng(seed ^ 0xb011e7ULL);
  const std::string boilerplate = english_text(boiler_rng, 1, 6);
  const std::string junk_line = "Share this page";
  const std::string lorem =
      "Lorem ipsum dolor sit amet, consectetur adipiscing elit, sed do eiusmod tempor incididunt.";

  struct Plan {
    int bucket;
    std::string text;
    PlannedFate fate;
  };
  std::vector<Plan> plans;
  auto kept = [](int bucket) { return PlannedFate{true, bucket_to_label(bucket), ""}; };
  auto dropped = [](const std::string& rule) { return PlannedFate{false, std::nullopt, rule}; };

  for (int i = 0; i < 20; ++i) {
    std::string text = english_text(rng, 8) + "\n" + junk_line;
    if (i == 0) text = english_text(rng, 4) + "\n" + lorem + "\n" + english_text(rng, 4);
    plans.push_back({19, text, kept(19)});
  }
  for (int i = 0; i < 20; ++i) plans.push_back({18, english_text(rng, 8), kept(18)});
  std::uniform_int_distribution<int> medium(12, 17);
  for (int i = 0; i < 60; ++i) {
    const int b = medium(rng);
    if (i < 5) {
      plans.push_back({b, english_text(rng, 3, 1), dropped("gopher_word_count")});
    } else if (i < 10) {
      plans.push_back({b, english_text(rng, 4) + "\n" + boilerplate + "\n" + english_text(rng, 4), kept(b)});
    } else {
      plans.push_back({b, english_text(rng, 8), kept(b)});
    }
  }
  std::uniform_int_distribution<int> medium_low(7, 11);
  for (int i = 0; i < 40; ++i) {
    const int b = medium_low(rng);
    plans.push_back({b, english_text(rng, 8) + "\n" + junk_line, kept(b)});
  }
  std::uniform_int_distribution<int> low(0, 6);
  for (int i = 0; i < 40; ++i) {
    if (i == 0) {
      plans.push_back({5, english_text(rng, 4) + "\n" + lorem + "\n" + english_text(rng, 4), dropped("c4_lorem_ipsum")});
      continue;
    }
    const int b = low(rng);
    if (i <= 5) {
      plans.push_back({b, gibberish_text(rng, 8), dropped("perplexity")});
    } else {
      plans.push_back({b, english_text(rng, 8), kept(b)});
    }
  }
  for (int i = 0; i < 10; ++i) plans.push_back({medium(rng), french_text(rng, 8), dropped("language")});
  std::shuffle(plans.begin(), plans.end(), rng);

  // Verbatim copies of kept Medium documents go last so the originals win.
  std::vector<Plan> copies;
  for (const auto& p : plans) {
    if (copies.size() == 10) break;
    if (p.fate.kept && p.fate.label == QualityLabel::Medium && p.text.find(boilerplate) == std::string::npos)
      copies.push_back({p.bucket, p.text, dropped("fuzzy_duplicate")});
  }
  plans.insert(plans.end(), copies.begin(), copies.end());

  std::uniform_real_distribution<double> jitter(0.0, 0.02);
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& p = plans[i];
    Document d;
    d.id = "smoke-" + padded(i);
    d.url = "https://site" + std::to_string(i % 37) + ".example.com/page/" + std::to_string(i);
    d.snapshot = "CC-MAIN-2024-10";
    d.text = p.text;
    d.scores["edu"] = score_for_bucket(p.bucket) + jitter(rng);
    std::uniform_int_distribution<int> lower(0, p.bucket);
    d.scores["dclm"] = score_for_bucket(lower(rng)) + jitter(rng);
    c.fate[d.id] = p.fate;
    if (p.text.find(lorem) != std::string::npos) (p.bucket == 19 ? c.lorem_high_id : c.lorem_low_id) = d.id;
    c.docs.push_back(std::move(d));
  }

  std::mt19937_64 lm_rng(seed + 1);
  for (int i = 0; i < 300; ++i) {
    auto t = english_text(lm_rng, 8);
    std::replace(t.begin(), t.end(), '\n', ' ');
    c.lm_training_texts.push_back(std::move(t));
  }
  c.perplexity_threshold = 2000;
  return c;
}

fs::path write_smoke_workspace(const fs::path& dir, const SmokeCorpus& corpus, const std::string& endpoint,
                               std::size_t workers) {
  fs::create_directories(dir);
  write_records(corpus.docs, dir / "corpus.jsonl", RecordFormat::Jsonl);
  std::string lm;
  for (const auto& t : corpus.lm_training_texts) lm += t + "\n";
  write_file(dir / "lm_train.txt", lm);
  write_file(dir / "boundaries.json", uniform_boundaries_json({"dclm", "edu"}).dump(2) + "\n");

  Json cfg = {
      {"input", {{"paths", {"corpus.jsonl"}}}},
      {"output", "out"},
      {"seed", 7},
      {"workers", workers},
      {"shard_count", 4},
      {"langid", {{"mode", "native"}, {"threshold", 0.3}}},
      {"dedup_exact", {{"min_match_tokens", 50}}},
      {"quality",
       {{"scorers",
         {{{"name", "edu"}, {"kind", "external_scores"}}, {{"name", "dclm"}, {"kind", "external_scores"}}}},
        {"boundaries", "boundaries.json"}}},
      {"perplexity", {{"train_corpus", "lm_train.txt"}, {"order", 3}, {"threshold", corpus.perplexity_threshold}}},
      {"endpoint",
       {{"base_url", endpoint},
        {"model", "stub"},
        {"max_attempts", 2},
        {"backoff_base_seconds", 0.01},
        {"max_in_flight", 4},
        {"timeout_seconds", 30}}}};
  const auto path = dir / "config.json";
  write_file(path, "// smoke pipeline\n" + cfg.dump(2) + "\n");
  return path;
}

}  // namespace curate::test
