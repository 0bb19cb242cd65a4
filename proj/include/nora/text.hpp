#pragma once

// UTF-8 helpers shared by the NLU and empathy tokenizers.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nora::text {

struct CodePoint {
  char32_t value;
  std::size_t begin;  // byte offset in the source string
  std::size_t end;
};

// Decodes UTF-8; invalid bytes decode as U+FFFD covering one byte.
inline std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok) {
      out.push_back({0xFFFD, i, i + 1});
      ++i;
      continue;
    }
    out.push_back({cp, i, i + len});
    i += len;
  }
  return out;
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

inline bool is_cjk(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
         (c >= 0x20000 && c <= 0x2A6DF) || (c >= 0xF900 && c <= 0xFAFF) ||
         c == 0x3007;  // 〇
}

inline bool is_ascii_alnum(char32_t c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

// Letters outside ASCII and CJK (accented Latin, Cyrillic, ...) are kept as
// word characters so they are not silently dropped.
inline bool is_word_char(char32_t c) {
  if (is_ascii_alnum(c) || c == '\'' || c == 0x2019) return true;
  if (c < 0x80) return false;
  if (is_cjk(c)) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  if (c >= 0xFF00 && c <= 0xFF65) return false;  // fullwidth forms
  if (c >= 0x1F000) return false;                // emoji and friends
  if (c == 0xFFFD || c == 0xFEFF) return false;
  return true;
}

inline char32_t ascii_lower(char32_t c) {
  return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c;
}

inline std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// True when the string holds nothing but whitespace (including U+3000).
inline bool is_blank(std::string_view s) {
  for (const auto& cp : decode(s)) {
    const char32_t c = cp.value;
    if (!(c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
          c == '\v' || c == 0x3000 || c == 0xA0)) {
      return false;
    }
  }
  return true;
}

struct Token {
  std::string text;   // normalized form (ASCII lowercased)
  std::size_t begin;  // byte span in the source
  std::size_t end;
};

// Word tokens: maximal runs of word characters, ASCII lowercased. Each CJK
// character becomes a token of its own.
inline std::vector<Token> word_tokens(std::string_view s) {
  std::vector<Token> out;
  const auto cps = decode(s);
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t c = cps[i].value;
    if (is_cjk(c)) {
      out.push_back({std::string(s.substr(cps[i].begin, cps[i].end - cps[i].begin)),
                     cps[i].begin, cps[i].end});
      ++i;
      continue;
    }
    if (!is_word_char(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && is_word_char(cps[j].value)) ++j;
    const std::size_t run_end = j;
    // Quotes around a word are punctuation, not part of it.
    auto is_quote = [](char32_t q) { return q == '\'' || q == 0x2019; };
    std::size_t a = i;
    while (a < j && is_quote(cps[a].value)) ++a;
    while (j > a && is_quote(cps[j - 1].value)) --j;
    i = run_end;
    if (a == j) continue;
    Token tok{{}, cps[a].begin, cps[j - 1].end};
    for (std::size_t k = a; k < j; ++k) {
      append_utf8(tok.text, ascii_lower(cps[k].value == 0x2019 ? U'\'' : cps[k].value));
    }
    if (!tok.text.empty()) out.push_back(std::move(tok));
  }
  return out;
}

}  // namespace nora::text
