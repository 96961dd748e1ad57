#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace liftmc {

// Error taxonomy shared by the whole library. The CLI maps these to exit
// codes: parse_error -> 2, resource_error -> 3, everything else -> 1.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : error {
  using error::error;
};

// Dimension / degree mismatches between states, models and permutations.
struct dimension_error : error {
  using error::error;
};

// A configured scale guard was exceeded (oracle caps, orbit caps, search
// node budgets). Never silently truncated.
struct resource_error : error {
  using error::error;
};

struct config_error : error {
  using error::error;
};

// Round-trip exact serialization of a double. Two equal strings parse to
// bit-identical doubles, which is what weight-color grouping keys on.
inline std::string format_weight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

// 12-significant-digit form used by the domain generators. Generators
// re-parse this string so the emitted model file and the in-memory model
// carry bit-identical weights.
inline std::string format_weight12(double w) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", w);
  return buf;
}

inline double parse_double(std::string_view text, const std::string& what) {
  std::string s(text);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw parse_error("invalid number '" + s + "' in " + what);
  if (!std::isfinite(v))
    throw parse_error("non-finite number '" + s + "' in " + what);
  return v;
}

// FNV-1a, used for config hashes and refinement traces.
inline uint64_t fnv1a(uint64_t h, uint64_t x) {
  for (int i = 0; i < 8; ++i) {
    h ^= (x >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a_bytes(uint64_t h, const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.push_back(text.substr(pos));
      break;
    }
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

}  // namespace liftmc
