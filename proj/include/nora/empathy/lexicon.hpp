#pragma once

// Lexicon files hold one `token<TAB>class` entry per line (UTF-8). Blank
// lines and '#' comments are skipped. A token may carry several classes.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "nora/error.hpp"
#include "nora/text.hpp"

namespace nora::empathy {

class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon parse(std::string_view document) {
    Lexicon lex;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= document.size()) {
      auto nl = document.find('\n', pos);
      if (nl == std::string_view::npos) nl = document.size();
      std::string_view line = document.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos) throw ParseError(line_no, "expected token<TAB>class");
      const auto token = text::trim(line.substr(0, tab));
      const auto cls = text::trim(line.substr(tab + 1));
      if (token.empty() || cls.empty()) throw ParseError(line_no, "empty token or class");
      lex.add(token, cls);
    }
    return lex;
  }

  static Lexicon load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::NotFound, "cannot open lexicon " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  void add(std::string_view token, std::string_view cls) {
    auto toks = text::word_tokens(token);
    std::string key;
    for (const auto& t : toks) key += t.text;  // CJK entries are stored unsplit
    if (toks.size() > 1 && !all_cjk(toks)) {
      fail(ErrorKind::InvalidInput, "lexicon entries must be single words: " + std::string(token));
    }
    if (key.empty()) fail(ErrorKind::InvalidInput, "lexicon token has no word characters");
    auto& classes = entries_[key];
    if (std::find(classes.begin(), classes.end(), cls) == classes.end()) {
      classes.emplace_back(cls);
    }
    max_cjk_len_ = std::max(max_cjk_len_, all_cjk(toks) ? toks.size() : std::size_t{1});
  }

  // Classes of a token, empty when absent.
  const std::vector<std::string>& classes_of(const std::string& token) const {
    static const std::vector<std::string> none;
    auto it = entries_.find(token);
    return it == entries_.end() ? none : it->second;
  }

  bool contains(const std::string& token) const { return entries_.count(token) > 0; }

  std::size_t size() const { return entries_.size(); }

  const std::unordered_map<std::string, std::vector<std::string>>& entries() const {
    return entries_;
  }

  // Word tokens, with runs of adjacent CJK characters merged by forward
  // maximum matching against the lexicon.
  std::vector<std::string> segment(std::string_view s) const {
    const auto toks = text::word_tokens(s);
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < toks.size()) {
      if (!is_cjk_token(toks[i])) {
        out.push_back(toks[i].text);
        ++i;
        continue;
      }
      // Longest adjacent CJK run starting at i that is a lexicon entry.
      std::size_t run = 1;
      while (i + run < toks.size() && run < max_cjk_len_ && is_cjk_token(toks[i + run]) &&
             toks[i + run - 1].end == toks[i + run].begin) {
        ++run;
      }
      std::size_t take = 1;
      for (std::size_t len = run; len > 1; --len) {
        std::string cand;
        for (std::size_t k = 0; k < len; ++k) cand += toks[i + k].text;
        if (contains(cand)) {
          take = len;
          break;
        }
      }
      std::string word;
      for (std::size_t k = 0; k < take; ++k) word += toks[i + k].text;
      out.push_back(std::move(word));
      i += take;
    }
    return out;
  }

 private:
  static bool is_cjk_token(const text::Token& t) {
    const auto cps = text::decode(t.text);
    return cps.size() == 1 && text::is_cjk(cps[0].value);
  }

  static bool all_cjk(const std::vector<text::Token>& toks) {
    for (const auto& t : toks) {
      if (!is_cjk_token(t)) return false;
    }
    return !toks.empty();
  }

  std::unordered_map<std::string, std::vector<std::string>> entries_;
  std::size_t max_cjk_len_ = 1;
};

}  // namespace nora::empathy
