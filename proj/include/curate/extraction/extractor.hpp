#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace curate {

enum class BlockClass { Good, NearGood, Short, Bad };

std::string_view block_class_name(BlockClass c);

// One paragraph-level unit of an HTML page.
struct TextBlock {
  std::string text;             // whitespace-collapsed, entity-decoded
  std::size_t word_count = 0;
  std::size_t char_count = 0;   // code points
  std::size_t link_chars = 0;   // code points inside <a> elements
  double link_density = 0.0;    // link_chars / char_count
  double stopword_density = 0.0;
  bool has_copyright_mark = false;
  BlockClass ctx_free_class = BlockClass::Bad;
  BlockClass final_class = BlockClass::Bad;  // Good or Bad after classify_blocks
};

using StopwordSet = std::unordered_set<std::string>;

/// The bundled English list (about 560 words).
const StopwordSet& default_stopwords();
/// One lowercase word per line, UTF-8; blank lines ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);

// Block lengths are measured in characters.
struct ExtractionParams {
  std::size_t length_low = 70;
  std::size_t length_high = 200;
  double stopwords_low = 0.30;
  double stopwords_high = 0.32;
  double max_link_density = 0.2;
  const StopwordSet* stopwords = nullptr;  // null means default_stopwords()

  /// Throws ConfigError when the ordering constraints are violated.
  void validate() const;
  const StopwordSet& stoplist() const { return stopwords ? *stopwords : default_stopwords(); }
};

/// Splits HTML into blocks at block-level tag boundaries. script, style,
/// noscript, template, head content and comments are dropped. Never fails;
/// malformed markup degrades to coarser blocks.
std::vector<TextBlock> segment_html(std::string_view html);

/// Fraction of a block's words that are stopwords (case-insensitive, edge
/// punctuation stripped).
double stopword_density(std::string_view text, const StopwordSet& stopwords);

/// Context-free classification followed by the neighbour-based revision of
/// short and near-good blocks. Fills stopword_density, ctx_free_class and
/// final_class.
void classify_blocks(std::vector<TextBlock>& blocks, const ExtractionParams& params);

/// Good blocks joined by blank lines; empty when nothing survives.
std::string extract_text(std::string_view html, const ExtractionParams& params = {});

}  // namespace curate
