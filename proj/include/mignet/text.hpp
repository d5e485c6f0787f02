#pragma once

#include <cstdint>
#include <locale>
#include <optional>
#include <string>
#include <string_view>

namespace mignet {

namespace detail {

inline const std::ctype<wchar_t>* unicode_ctype() {
  static const std::ctype<wchar_t>* facet = []() -> const std::ctype<wchar_t>* {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        static std::locale loc(name);
        return &std::use_facet<std::ctype<wchar_t>>(loc);
      } catch (const std::runtime_error&) {
      }
    }
    return nullptr;
  }();
  return facet;
}

inline void append_utf8(std::string& out, char32_t cp) {
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

}  // namespace detail

/// Simple (one-to-one) Unicode lowercasing of a UTF-8 string. Returns nullopt
/// on invalid UTF-8.
inline std::optional<std::string> utf8_lower(std::string_view s) {
  const auto* facet = detail::unicode_ctype();
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    int extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      return std::nullopt;
    }
    if (extra > 0 && i + extra >= s.size()) return std::nullopt;
    for (int k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return std::nullopt;
      cp = (cp << 6) | (cc & 0x3F);
    }
    i += 1 + extra;
    if (cp < 0x80) {
      if (cp >= 'A' && cp <= 'Z') cp += 'a' - 'A';
    } else if (facet != nullptr) {
      cp = static_cast<char32_t>(facet->tolower(static_cast<wchar_t>(cp)));
    }
    detail::append_utf8(out, cp);
  }
  return out;
}

inline bool is_unicode_space(std::string_view s) {
  for (unsigned char c : s)
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') return true;
  // U+00A0 and U+3000 are the non-ASCII spaces seen in tweet payloads.
  return s.find("\xC2\xA0") != std::string_view::npos || s.find("\xE3\x80\x80") != std::string_view::npos;
}

/// Canonical hashtag token: leading '#' characters stripped, lowercased.
/// Returns nullopt if the result is empty, contains whitespace, or is not UTF-8.
inline std::optional<std::string> normalize_hashtag(std::string_view raw) {
  while (!raw.empty() && raw.front() == '#') raw.remove_prefix(1);
  if (raw.empty() || is_unicode_space(raw)) return std::nullopt;
  return utf8_lower(raw);
}

}  // namespace mignet
