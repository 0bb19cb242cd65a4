#pragma once

// Number extraction for the temperature and breath-counting turns.

#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>

#include "nora/nlu/types.hpp"

namespace nora::nlu {

namespace detail {

inline int mandarin_digit(char32_t c) {
  switch (c) {
    case U'零': case U'〇': return 0;
    case U'一': return 1;
    case U'二': case U'两': return 2;
    case U'三': return 3;
    case U'四': return 4;
    case U'五': return 5;
    case U'六': return 6;
    case U'七': return 7;
    case U'八': return 8;
    case U'九': return 9;
    default: return -1;
  }
}

inline long mandarin_unit(char32_t c) {
  switch (c) {
    case U'十': return 10;
    case U'百': return 100;
    case U'千': return 1000;
    case U'万': return 10000;
    default: return 0;
  }
}

inline bool is_mandarin_numeral(char32_t c) {
  return mandarin_digit(c) >= 0 || mandarin_unit(c) > 0;
}

inline int ascii_digit(char32_t c) {
  if (c >= '0' && c <= '9') return static_cast<int>(c - '0');
  if (c >= U'０' && c <= U'９') return static_cast<int>(c - U'０');
  return -1;
}

}  // namespace detail

// Converts a run of Mandarin numeral characters ("三十七", "一百零五", "二零二一")
// to an integer. Runs made only of digit characters read positionally.
inline std::optional<long> parse_mandarin_integer(std::u32string_view run) {
  if (run.empty()) return std::nullopt;
  bool has_unit = false;
  for (char32_t c : run) {
    if (!detail::is_mandarin_numeral(c)) return std::nullopt;
    if (detail::mandarin_unit(c) > 0) has_unit = true;
  }
  if (!has_unit) {
    long v = 0;
    for (char32_t c : run) v = v * 10 + detail::mandarin_digit(c);
    return v;
  }
  long total = 0;    // completed 万 groups
  long section = 0;  // value below 万
  long digit = -1;   // pending digit, -1 when none
  for (char32_t c : run) {
    if (const int d = detail::mandarin_digit(c); d >= 0) {
      digit = d;
      continue;
    }
    const long unit = detail::mandarin_unit(c);
    if (unit == 10000) {
      section += digit > 0 ? digit : 0;
      total = (total + (section == 0 ? 1 : section)) * 10000;
      section = 0;
    } else {
      // A bare 十 reads as 一十.
      section += (digit < 0 ? 1 : digit) * unit;
    }
    digit = -1;
  }
  if (digit > 0) section += digit;
  return total + section;
}

namespace detail {

struct NumberHit {
  double value;
  std::size_t position;  // code point index
};

// Digit numbers: optional sign, digits, optional fraction.
inline std::vector<NumberHit> digit_numbers(const std::vector<text::CodePoint>& cps) {
  std::vector<NumberHit> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (ascii_digit(cps[i].value) < 0) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    double v = 0;
    while (i < cps.size() && ascii_digit(cps[i].value) >= 0) v = v * 10 + ascii_digit(cps[i++].value);
    const bool point = i + 1 < cps.size() &&
                       (cps[i].value == '.' || cps[i].value == U'．' || cps[i].value == U'点') &&
                       ascii_digit(cps[i + 1].value) >= 0;
    if (point) {
      ++i;
      double scale = 0.1;
      while (i < cps.size() && ascii_digit(cps[i].value) >= 0) {
        v += scale * ascii_digit(cps[i++].value);
        scale /= 10;
      }
    }
    const bool negative = start > 0 && cps[start - 1].value == '-' &&
                          (start == 1 || !text::is_word_char(cps[start - 2].value));
    out.push_back({negative ? -v : v, negative ? start - 1 : start});
  }
  return out;
}

// Conventional spelling of 0..999 ("十五", "二十", "一百零五").
inline std::u32string canonical_mandarin(long n) {
  static const std::u32string digits = U"零一二三四五六七八九";
  if (n < 0 || n > 999) return {};
  if (n < 10) return std::u32string(1, digits[n]);
  std::u32string s;
  if (n >= 100) {
    s += digits[n / 100];
    s += U'百';
    n %= 100;
    if (n == 0) return s;
    if (n < 10) return s + U'零' + digits[n];
    s += digits[n / 10];
  } else if (n / 10 > 1) {
    s += digits[n / 10];
  }
  s += U'十';
  if (n % 10) s += digits[n % 10];
  return s;
}

// Splits a counting run into well-formed numerals, preferring at each step
// the piece that continues the count by one, otherwise the longest.
inline std::vector<std::pair<double, std::size_t>> split_count(std::u32string_view run) {
  std::vector<std::pair<double, std::size_t>> out;
  std::size_t i = 0;
  while (i < run.size()) {
    std::size_t best_len = 0;
    long best = -1;
    for (std::size_t len = std::min<std::size_t>(5, run.size() - i); len >= 1; --len) {
      const auto piece = run.substr(i, len);
      const auto v = parse_mandarin_integer(piece);
      if (!v || canonical_mandarin(*v) != piece) continue;
      if (best_len == 0) {
        best_len = len;
        best = *v;
      }
      if (!out.empty() && *v == static_cast<long>(out.back().first) + 1) {
        best_len = len;
        best = *v;
        break;
      }
    }
    if (best_len == 0) {  // not a numeral on its own (a stray unit)
      ++i;
      continue;
    }
    out.emplace_back(static_cast<double>(best), i);
    i += best_len;
  }
  return out;
}

// Mandarin numeral runs with an optional 点 fraction ("三十七点五").
inline std::vector<NumberHit> mandarin_numbers(const std::vector<text::CodePoint>& cps,
                                               bool split_digit_runs) {
  std::vector<NumberHit> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_mandarin_numeral(cps[i].value)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    std::u32string run;
    while (i < cps.size() && is_mandarin_numeral(cps[i].value)) run.push_back(cps[i++].value);
    if (split_digit_runs && canonical_mandarin(parse_mandarin_integer(run).value_or(-1)) != run) {
      // Counting aloud ("一二三四", "八九十") lists separate numbers.
      for (const auto& [value, offset] : split_count(run)) out.push_back({value, start + offset});
      continue;
    }
    double v = static_cast<double>(*parse_mandarin_integer(run));
    if (i + 1 < cps.size() && cps[i].value == U'点' && mandarin_digit(cps[i + 1].value) >= 0) {
      ++i;
      double scale = 0.1;
      while (i < cps.size() && mandarin_digit(cps[i].value) >= 0) {
        v += scale * mandarin_digit(cps[i++].value);
        scale /= 10;
      }
    }
    out.push_back({v, start});
  }
  return out;
}

inline const std::unordered_map<std::string, int>& english_number_words() {
  static const std::unordered_map<std::string, int> words = {
      {"zero", 0},      {"one", 1},        {"two", 2},        {"three", 3},
      {"four", 4},      {"five", 5},       {"six", 6},        {"seven", 7},
      {"eight", 8},     {"nine", 9},       {"ten", 10},       {"eleven", 11},
      {"twelve", 12},   {"thirteen", 13},  {"fourteen", 14},  {"fifteen", 15},
      {"sixteen", 16},  {"seventeen", 17}, {"eighteen", 18},  {"nineteen", 19},
      {"twenty", 20},   {"thirty", 30},    {"forty", 40},     {"fifty", 50},
      {"sixty", 60},    {"seventy", 70},   {"eighty", 80},    {"ninety", 90},
      {"hundred", 100}};
  return words;
}

// English number words; a tens word followed by a unit word combines
// ("twenty one" -> 21).
inline std::vector<double> english_word_numbers(std::string_view s) {
  const auto& words = english_number_words();
  const auto toks = text::word_tokens(s);
  std::vector<double> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    auto it = words.find(toks[i].text);
    if (it == words.end()) continue;
    int v = it->second;
    if (v >= 20 && v % 10 == 0 && v < 100 && i + 1 < toks.size()) {
      auto next = words.find(toks[i + 1].text);
      if (next != words.end() && next->second >= 1 && next->second <= 9) {
        v += next->second;
        ++i;
      }
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace detail

// First number in the utterance. Digits are read in both languages; Mandarin
// numerals are read for ZH.
inline std::optional<double> parse_number(const Utterance& u) {
  const auto cps = text::decode(u.text);
  auto hits = detail::digit_numbers(cps);
  if (u.language == Language::ZH) {
    auto zh = detail::mandarin_numbers(cps, false);
    hits.insert(hits.end(), zh.begin(), zh.end());
  }
  if (hits.empty()) return std::nullopt;
  const auto first = std::min_element(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    return a.position < b.position;
  });
  return first->value;
}

// Highest number reached while counting aloud: the maximum over digits,
// English number words (EN) and Mandarin numerals (ZH).
inline std::optional<double> parse_count(const Utterance& u) {
  const auto cps = text::decode(u.text);
  std::vector<double> values;
  for (const auto& h : detail::digit_numbers(cps)) values.push_back(h.value);
  if (u.language == Language::EN) {
    const auto words = detail::english_word_numbers(u.text);
    values.insert(values.end(), words.begin(), words.end());
  } else {
    for (const auto& h : detail::mandarin_numbers(cps, true)) values.push_back(h.value);
  }
  if (values.empty()) return std::nullopt;
  return *std::max_element(values.begin(), values.end());
}

}  // namespace nora::nlu
