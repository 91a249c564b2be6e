#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "curate/core/error.hpp"

namespace curate::binio {

// Fixed-width little-endian encoding regardless of host byte order.
inline void put_uint(std::ostream& os, std::uint64_t v, int bytes) {
  char b[8];
  for (int i = 0; i < bytes; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, bytes);
}
inline void put_u32(std::ostream& os, std::uint32_t v) { put_uint(os, v, 4); }
inline void put_u64(std::ostream& os, std::uint64_t v) { put_uint(os, v, 8); }
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
inline void put_str(std::ostream& os, std::string_view s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint64_t get_uint(std::istream& is, int bytes) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), bytes)) throw Error("unexpected end of binary file");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline std::uint32_t get_u32(std::istream& is) { return static_cast<std::uint32_t>(get_uint(is, 4)); }
inline std::uint64_t get_u64(std::istream& is) { return get_uint(is, 8); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }
inline std::string get_str(std::istream& is, std::size_t max_len = 1u << 30) {
  const auto n = get_u32(is);
  if (n > max_len) throw Error("binary string length out of range");
  std::string s(n, '\0');
  if (!is.read(s.data(), n)) throw Error("unexpected end of binary file");
  return s;
}

/// Reads `magic.size()` bytes and throws unless they match.
inline void expect_magic(std::istream& is, std::string_view magic, std::string_view what) {
  std::string got(magic.size(), '\0');
  if (!is.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic)
    throw Error("not a " + std::string(what) + " file (bad magic)");
}

}  // namespace curate::binio
