#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sitehunt/urlnorm.hpp"

namespace sitehunt {
namespace {

constexpr std::uint32_t kBase = 36;
constexpr std::uint32_t kTmin = 1;
constexpr std::uint32_t kTmax = 26;
constexpr std::uint32_t kSkew = 38;
constexpr std::uint32_t kDamp = 700;
constexpr std::uint32_t kInitialBias = 72;
constexpr std::uint32_t kInitialN = 128;

std::uint32_t adapt(std::uint32_t delta, std::uint32_t numpoints, bool first) {
  delta = first ? delta / kDamp : delta / 2;
  delta += delta / numpoints;
  std::uint32_t k = 0;
  while (delta > ((kBase - kTmin) * kTmax) / 2) {
    delta /= kBase - kTmin;
    k += kBase;
  }
  return k + (kBase - kTmin + 1) * delta / (delta + kSkew);
}

std::optional<std::uint32_t> digit_value(char c) {
  if (c >= '0' && c <= '9') return static_cast<std::uint32_t>(c - '0' + 26);
  if (c >= 'a' && c <= 'z') return static_cast<std::uint32_t>(c - 'a');
  if (c >= 'A' && c <= 'Z') return static_cast<std::uint32_t>(c - 'A');
  return std::nullopt;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::optional<std::string> punycode_decode(std::string_view encoded) {
  std::vector<std::uint32_t> output;
  std::size_t basic_end = encoded.rfind('-');
  std::size_t in = 0;
  if (basic_end != std::string_view::npos) {
    for (std::size_t j = 0; j < basic_end; ++j) {
      auto c = static_cast<unsigned char>(encoded[j]);
      if (c >= 0x80) return std::nullopt;
      output.push_back(c);
    }
    in = basic_end + 1;
  }

  std::uint32_t n = kInitialN;
  std::uint32_t bias = kInitialBias;
  std::uint64_t i = 0;
  while (in < encoded.size()) {
    const std::uint64_t old_i = i;
    std::uint64_t w = 1;
    for (std::uint32_t k = kBase;; k += kBase) {
      if (in >= encoded.size()) return std::nullopt;
      auto digit = digit_value(encoded[in++]);
      if (!digit) return std::nullopt;
      i += *digit * w;
      if (i > 0x10FFFF * 64ULL) return std::nullopt;
      const std::uint32_t t = k <= bias ? kTmin : (k >= bias + kTmax ? kTmax : k - bias);
      if (*digit < t) break;
      w *= kBase - t;
    }
    const auto len = static_cast<std::uint32_t>(output.size() + 1);
    bias = adapt(static_cast<std::uint32_t>(i - old_i), len, old_i == 0);
    n += static_cast<std::uint32_t>(i / len);
    i %= len;
    if (n > 0x10FFFF || (n >= 0xD800 && n <= 0xDFFF)) return std::nullopt;
    output.insert(output.begin() + static_cast<std::ptrdiff_t>(i), n);
    ++i;
  }

  std::string utf8;
  for (std::uint32_t cp : output) append_utf8(utf8, cp);
  return utf8;
}

}  // namespace sitehunt
