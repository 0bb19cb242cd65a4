#pragma once

// Compilation and matching of literal phrases and slot templates over word
// tokens. English text yields lowercased word tokens; each CJK character is
// its own token, so Mandarin patterns match on character n-grams.

#include <algorithm>
#include <set>

#include "nora/nlu/types.hpp"

namespace nora::nlu {

inline Pattern compile_pattern(std::string_view source) {
  Pattern p{std::string(source), {}};
  std::set<std::string> names;
  std::size_t pos = 0;
  auto add_literals = [&](std::string_view chunk) {
    for (auto& tok : text::word_tokens(chunk)) {
      p.elements.push_back({PatternElement::Kind::Literal, std::move(tok.text), {}});
    }
  };
  while (pos < source.size()) {
    const auto open = source.find('{', pos);
    if (open == std::string_view::npos) {
      add_literals(source.substr(pos));
      break;
    }
    add_literals(source.substr(pos, open - pos));
    const auto close = source.find('}', open);
    if (close == std::string_view::npos) {
      fail(ErrorKind::Unprocessable, "unterminated placeholder in pattern: " + p.source);
    }
    const std::string name(text::trim(source.substr(open + 1, close - open - 1)));
    if (name.empty()) fail(ErrorKind::Unprocessable, "empty placeholder in pattern: " + p.source);
    if (!names.insert(name).second) {
      fail(ErrorKind::InvalidInput, "duplicate placeholder {" + name + "} in pattern: " + p.source);
    }
    p.elements.push_back({PatternElement::Kind::Slot, name, {}});
    pos = close + 1;
  }
  if (p.elements.empty()) fail(ErrorKind::InvalidInput, "pattern has no tokens: " + p.source);
  return p;
}

struct TokenRange {
  std::size_t begin = 0;  // token indices, half-open
  std::size_t end = 0;
  friend bool operator==(const TokenRange&, const TokenRange&) = default;
};

struct PatternMatch {
  TokenRange span;
  std::map<std::string, TokenRange> bindings;
};

namespace detail {

inline bool is_cjk_token(const text::Token& t) {
  const auto cps = text::decode(t.text);
  return cps.size() == 1 && text::is_cjk(cps[0].value);
}

// Token texts joined with spaces, except between two CJK characters.
inline std::string join_tokens(const std::vector<text::Token>& toks, std::size_t b, std::size_t e) {
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (i > b && !(is_cjk_token(toks[i - 1]) && is_cjk_token(toks[i]))) out.push_back(' ');
    out += toks[i].text;
  }
  return out;
}

inline bool head_allowed(const PatternElement& el, const std::vector<text::Token>& toks, std::size_t b,
                         std::size_t e) {
  if (el.allowed_heads.empty()) return true;
  for (std::size_t start = e; start-- > b;) {
    const auto suffix = join_tokens(toks, start, e);
    for (const auto& h : el.allowed_heads) {
      if (suffix == h) return true;
    }
  }
  return false;
}

inline bool match_from(const std::vector<PatternElement>& els, std::size_t ei,
                       const std::vector<text::Token>& toks, std::size_t ti,
                       std::map<std::string, TokenRange>& bindings, std::size_t& end) {
  if (ei == els.size()) {
    end = ti;
    return true;
  }
  const auto& el = els[ei];
  if (el.kind == PatternElement::Kind::Literal) {
    if (ti < toks.size() && toks[ti].text == el.text) {
      return match_from(els, ei + 1, toks, ti + 1, bindings, end);
    }
    return false;
  }
  // Slots bind one or more tokens, longest first.
  for (std::size_t stop = toks.size(); stop > ti; --stop) {
    if (!head_allowed(el, toks, ti, stop)) continue;
    bindings[el.text] = {ti, stop};
    if (match_from(els, ei + 1, toks, stop, bindings, end)) return true;
  }
  bindings.erase(el.text);
  return false;
}

}  // namespace detail

// Leftmost match; among matches at that start, slots take the longest
// bindings in left-to-right order.
inline std::optional<PatternMatch> match_pattern(const Pattern& p,
                                                 const std::vector<text::Token>& toks) {
  for (std::size_t start = 0; start < toks.size(); ++start) {
    std::map<std::string, TokenRange> bindings;
    std::size_t end = 0;
    if (detail::match_from(p.elements, 0, toks, start, bindings, end)) {
      return PatternMatch{{start, end}, std::move(bindings)};
    }
  }
  return std::nullopt;
}

// Leading function words dropped from slot values ("my parents" -> "parents").
inline const std::vector<std::vector<std::string>>& determiners(Language lang) {
  static const std::vector<std::vector<std::string>> en = {
      {"my"}, {"our"}, {"your"}, {"his"}, {"her"}, {"their"}, {"its"},
      {"the"}, {"a"}, {"an"}, {"some"}, {"this"}, {"that"}, {"these"}, {"those"}};
  static const std::vector<std::vector<std::string>> zh = {
      {"我", "们", "的"}, {"你", "们", "的"}, {"我", "的"}, {"你", "的"},
      {"他", "的"}, {"她", "的"}, {"这", "个"}, {"那", "个"}, {"我"}, {"的"}};
  return lang == Language::EN ? en : zh;
}

inline TokenRange strip_determiners(const std::vector<text::Token>& toks, TokenRange r,
                                    Language lang) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& det : determiners(lang)) {
      if (r.end - r.begin <= det.size()) continue;
      bool all = true;
      for (std::size_t k = 0; k < det.size(); ++k) {
        if (toks[r.begin + k].text != det[k]) {
          all = false;
          break;
        }
      }
      if (all) {
        r.begin += det.size();
        changed = true;
        break;
      }
    }
  }
  return r;
}

inline std::string span_text(std::string_view source, const std::vector<text::Token>& toks,
                             TokenRange r) {
  const auto b = toks[r.begin].begin;
  const auto e = toks[r.end - 1].end;
  return std::string(source.substr(b, e - b));
}

}  // namespace nora::nlu
