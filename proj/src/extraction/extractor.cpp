#include "curate/extraction/extractor.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "curate/core/error.hpp"
#include "curate/core/token_counter.hpp"
#include "curate/extraction/embedded_data.hpp"
#include "curate/extraction/utf8.hpp"

namespace curate {

namespace {

constexpr std::array<std::string_view, 38> kBlockTags = {
    "p",       "div",      "h1",     "h2",      "h3",     "h4",     "h5",     "h6",
    "li",      "td",       "th",     "pre",     "blockquote", "ul", "ol",     "dl",
    "dt",      "dd",       "table",  "tr",      "thead",  "tbody",  "tfoot",  "section",
    "article", "header",   "footer", "nav",     "aside",  "main",   "form",   "address",
    "figure",  "figcaption", "hr",   "body",    "html",   "title"};

constexpr std::array<std::string_view, 8> kSkipContentTags = {
    "script", "style", "noscript", "template", "svg", "iframe", "object", "textarea"};

bool is_block_tag(std::string_view name) {
  return std::find(kBlockTags.begin(), kBlockTags.end(), name) != kBlockTags.end();
}

bool is_skip_tag(std::string_view name) {
  return std::find(kSkipContentTags.begin(), kSkipContentTags.end(), name) != kSkipContentTags.end();
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Case-insensitive search for `needle` (already lower-case) from `from`.
std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (std::tolower(static_cast<unsigned char>(hay[i + k])) != needle[k]) {
        match = false;
        break;
      }
    }
    if (match) return i;
  }
  return std::string_view::npos;
}

// Finds the '>' closing a tag that starts at `lt`, honouring quoted values.
std::size_t tag_end(std::string_view html, std::size_t lt) {
  char quote = 0;
  for (std::size_t i = lt + 1; i < html.size(); ++i) {
    const char c = html[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return i;
    }
  }
  return std::string_view::npos;
}

// Decodes one entity starting at html[i] == '&'. Returns the number of
// bytes consumed (0 when the text is not a recognised entity).
std::size_t decode_entity(std::string_view html, std::size_t i, std::string& out) {
  const std::size_t semi = html.find(';', i);
  if (semi == std::string_view::npos || semi - i > 10) return 0;
  const std::string_view name = html.substr(i + 1, semi - i - 1);
  if (name.empty()) return 0;
  if (name[0] == '#') {
    char32_t cp = 0;
    bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
    std::string_view digits = name.substr(hex ? 2 : 1);
    if (digits.empty()) return 0;
    for (char c : digits) {
      int v;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
      else return 0;
      cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
      if (cp > 0x10FFFF) return 0;
    }
    if (cp == 0xA0) cp = ' ';
    if (cp == 0) return 0;
    utf8::append(out, cp);
    return semi - i + 1;
  }
  struct Named {
    std::string_view name;
    char32_t cp;
  };
  static constexpr std::array<Named, 12> kNamed = {{{"amp", '&'},
                                                    {"lt", '<'},
                                                    {"gt", '>'},
                                                    {"quot", '"'},
                                                    {"apos", '\''},
                                                    {"nbsp", ' '},
                                                    {"copy", 0xA9},
                                                    {"reg", 0xAE},
                                                    {"mdash", 0x2014},
                                                    {"ndash", 0x2013},
                                                    {"hellip", 0x2026},
                                                    {"rsquo", 0x2019}}};
  for (const auto& n : kNamed) {
    if (n.name == name) {
      utf8::append(out, n.cp);
      return semi - i + 1;
    }
  }
  return 0;
}

// Accumulates raw text for the block being built, with a per-byte flag
// recording whether the byte sits inside an anchor.
class BlockBuilder {
 public:
  void add(std::string_view bytes, bool in_link) {
    raw_.append(bytes);
    link_.insert(link_.end(), bytes.size(), in_link);
  }
  void add_space() { add(" ", false); }

  void flush(std::vector<TextBlock>& out) {
    TextBlock block;
    std::size_t link_chars = 0;
    bool pending_space = false;
    for (std::size_t i = 0; i < raw_.size(); ++i) {
      const char c = raw_[i];
      if (is_space(c)) {
        pending_space = !block.text.empty();
        continue;
      }
      if (pending_space) {
        block.text.push_back(' ');
        pending_space = false;
      }
      block.text.push_back(c);
      if (link_[i] && (static_cast<unsigned char>(c) & 0xC0) != 0x80) ++link_chars;
    }
    raw_.clear();
    link_.clear();
    if (block.text.empty()) return;
    block.char_count = utf8::length(block.text);
    block.link_chars = link_chars;
    block.link_density = static_cast<double>(link_chars) / static_cast<double>(block.char_count);
    block.word_count = split_whitespace(block.text).size();
    block.has_copyright_mark = block.text.find("\xC2\xA9") != std::string::npos;
    out.push_back(std::move(block));
  }

 private:
  std::string raw_;
  std::vector<bool> link_;
};

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

StopwordSet parse_stopwords(std::string_view data) {
  StopwordSet set;
  std::size_t start = 0;
  while (start <= data.size()) {
    std::size_t end = data.find('\n', start);
    if (end == std::string_view::npos) end = data.size();
    std::string_view line = data.substr(start, end - start);
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
    if (!line.empty()) set.insert(lower_ascii(line));
    start = end + 1;
  }
  return set;
}

bool is_edge_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string_view block_class_name(BlockClass c) {
  switch (c) {
    case BlockClass::Good: return "good";
    case BlockClass::NearGood: return "near_good";
    case BlockClass::Short: return "short";
    case BlockClass::Bad: return "bad";
  }
  return "bad";
}

const StopwordSet& default_stopwords() {
  static const StopwordSet set = parse_stopwords(embedded_stopwords_en());
  return set;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open stopword list: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_stopwords(data);
}

void ExtractionParams::validate() const {
  if (!(0.0 <= stopwords_low && stopwords_low <= stopwords_high && stopwords_high <= 1.0)) {
    throw ConfigError("extraction: require 0 <= stopwords_low <= stopwords_high <= 1");
  }
  if (length_low > length_high) throw ConfigError("extraction: require length_low <= length_high");
  if (max_link_density < 0.0 || max_link_density > 1.0) {
    throw ConfigError("extraction: max_link_density must be in [0,1]");
  }
}

std::vector<TextBlock> segment_html(std::string_view html) {
  std::vector<TextBlock> blocks;
  BlockBuilder builder;
  int link_depth = 0;
  bool last_was_br = false;
  std::size_t i = 0;
  std::size_t text_start = 0;

  auto emit_text = [&](std::size_t from, std::size_t to) {
    std::string decoded;
    for (std::size_t k = from; k < to; ++k) {
      if (html[k] == '&') {
        const std::size_t used = decode_entity(html, k, decoded);
        if (used > 0) {
          k += used - 1;
          continue;
        }
      }
      decoded.push_back(html[k]);
    }
    bool blank = std::all_of(decoded.begin(), decoded.end(), is_space);
    if (!blank) last_was_br = false;
    builder.add(decoded, link_depth > 0);
  };

  while (i < html.size()) {
    if (html[i] != '<') {
      ++i;
      continue;
    }
    emit_text(text_start, i);
    if (html.compare(i, 4, "<!--") == 0) {
      const std::size_t end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      text_start = i;
      continue;
    }
    const std::size_t gt = tag_end(html, i);
    if (gt == std::string_view::npos) {
      // Unterminated tag: treat the rest as markup.
      i = html.size();
      text_start = i;
      break;
    }
    std::size_t p = i + 1;
    const bool closing = p < gt && html[p] == '/';
    if (closing) ++p;
    if (p < gt && (html[p] == '!' || html[p] == '?')) {
      i = gt + 1;
      text_start = i;
      continue;
    }
    std::size_t name_end = p;
    while (name_end < gt && std::isalnum(static_cast<unsigned char>(html[name_end]))) ++name_end;
    const std::string name = lower_ascii(html.substr(p, name_end - p));
    i = gt + 1;
    text_start = i;
    if (name.empty()) {
      // Something like "< 3" in running text; keep it as text.
      builder.add(html.substr(p - (closing ? 2 : 1), gt + 1 - (p - (closing ? 2 : 1))), link_depth > 0);
      continue;
    }
    const bool self_closing = html[gt - 1] == '/';
    if (!closing && !self_closing && (is_skip_tag(name) || name == "head")) {
      const std::size_t close = ifind(html, "</" + name, i);
      if (close != std::string_view::npos) {
        const std::size_t close_gt = tag_end(html, close);
        i = close_gt == std::string_view::npos ? html.size() : close_gt + 1;
        text_start = i;
        builder.flush(blocks);
        continue;
      }
      if (name != "head") {
        i = html.size();
        text_start = i;
        break;
      }
      continue;
    }
    if (name == "a") {
      link_depth = closing ? std::max(0, link_depth - 1) : link_depth + (self_closing ? 0 : 1);
      continue;
    }
    if (name == "br") {
      if (last_was_br) {
        builder.flush(blocks);
        last_was_br = false;
      } else {
        builder.add_space();
        last_was_br = true;
      }
      continue;
    }
    if (is_block_tag(name)) {
      builder.flush(blocks);
      last_was_br = false;
      continue;
    }
    // Inline tags (span, b, em, ...) separate nothing; a space keeps words
    // apart when markup sits between them.
    if (name != "span" && name != "b" && name != "i" && name != "em" && name != "strong" &&
        name != "u" && name != "small" && name != "sup" && name != "sub" && name != "code") {
      builder.add_space();
    }
  }
  emit_text(text_start, html.size());
  builder.flush(blocks);
  return blocks;
}

double stopword_density(std::string_view text, const StopwordSet& stopwords) {
  const auto words = split_whitespace(text);
  if (words.empty()) return 0.0;
  std::size_t hits = 0;
  for (auto w : words) {
    while (!w.empty() && is_edge_punct(w.front())) w.remove_prefix(1);
    while (!w.empty() && is_edge_punct(w.back())) w.remove_suffix(1);
    if (!w.empty() && stopwords.count(lower_ascii(w))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(words.size());
}

namespace {

BlockClass context_free_class(const TextBlock& b, const ExtractionParams& p) {
  if (b.link_density > p.max_link_density) return BlockClass::Bad;
  if (b.has_copyright_mark) return BlockClass::Bad;
  if (b.char_count < p.length_low) {
    return b.link_chars > 0 ? BlockClass::Bad : BlockClass::Short;
  }
  if (b.stopword_density >= p.stopwords_high) {
    return b.char_count > p.length_high ? BlockClass::Good : BlockClass::NearGood;
  }
  if (b.stopword_density >= p.stopwords_low) return BlockClass::NearGood;
  return BlockClass::Bad;
}

// Nearest classified neighbour in direction `step`; short blocks are always
// skipped, near-good ones when `ignore_near_good`. The page edge counts as bad.
BlockClass neighbour(const std::vector<BlockClass>& classes, std::size_t i, int step,
                     bool ignore_near_good) {
  std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i);
  for (;;) {
    k += step;
    if (k < 0 || k >= static_cast<std::ptrdiff_t>(classes.size())) return BlockClass::Bad;
    const BlockClass c = classes[static_cast<std::size_t>(k)];
    if (c == BlockClass::Good || c == BlockClass::Bad) return c;
    if (c == BlockClass::NearGood && !ignore_near_good) return c;
  }
}

}  // namespace

void classify_blocks(std::vector<TextBlock>& blocks, const ExtractionParams& params) {
  params.validate();
  const auto& stoplist = params.stoplist();
  std::vector<BlockClass> classes(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    blocks[i].stopword_density = stopword_density(blocks[i].text, stoplist);
    blocks[i].ctx_free_class = context_free_class(blocks[i], params);
    classes[i] = blocks[i].ctx_free_class;
  }

  // Short blocks take their class from the surrounding good/bad blocks;
  // updates are applied together so shorts never see each other's result.
  std::vector<std::pair<std::size_t, BlockClass>> updates;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] != BlockClass::Short) continue;
    const BlockClass prev = neighbour(classes, i, -1, true);
    const BlockClass next = neighbour(classes, i, +1, true);
    BlockClass result;
    if (prev == BlockClass::Good && next == BlockClass::Good) {
      result = BlockClass::Good;
    } else if (prev == BlockClass::Bad && next == BlockClass::Bad) {
      result = BlockClass::Bad;
    } else if ((prev == BlockClass::Bad && neighbour(classes, i, -1, false) == BlockClass::NearGood) ||
               (next == BlockClass::Bad && neighbour(classes, i, +1, false) == BlockClass::NearGood)) {
      result = BlockClass::Good;
    } else {
      result = BlockClass::Bad;
    }
    updates.emplace_back(i, result);
  }
  for (const auto& [i, c] : updates) classes[i] = c;

  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] != BlockClass::NearGood) continue;
    const BlockClass prev = neighbour(classes, i, -1, true);
    const BlockClass next = neighbour(classes, i, +1, true);
    classes[i] = (prev == BlockClass::Bad && next == BlockClass::Bad) ? BlockClass::Bad : BlockClass::Good;
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].final_class = classes[i];
}

std::string extract_text(std::string_view html, const ExtractionParams& params) {
  auto blocks = segment_html(html);
  classify_blocks(blocks, params);
  std::string out;
  for (const auto& b : blocks) {
    if (b.final_class != BlockClass::Good) continue;
    if (!out.empty()) out += "\n\n";
    out += b.text;
  }
  return out;
}

}  // namespace curate
