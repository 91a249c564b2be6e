#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace curate::utf8 {

/// Decodes UTF-8; invalid sequences become U+FFFD.
std::vector<char32_t> decode(std::string_view s);
void append(std::string& out, char32_t cp);
/// Number of code points (continuation bytes are not counted).
std::size_t length(std::string_view s);
/// Simple case folding for Latin, Latin-1, Latin Extended-A, Greek and Cyrillic.
char32_t to_lower(char32_t cp);
bool is_letter(char32_t cp);

}  // namespace curate::utf8
