#pragma once

// Response templates, one file per language, in a TOML subset:
//
//   [mood.neutral]
//   0 = "How are you feeling today?"
//   1 = "How has your day been so far?"
//   [mood.empathetic]
//   0 = "I'm here for you. How are you feeling right now?"
//
// Sections are `<name>.<variant>`; keys are rotation indices. Strings use
// TOML basic-string escapes (\" \\ \n \t \uXXXX).

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "nora/error.hpp"
#include "nora/text.hpp"

namespace nora::dialogue {

enum class Variant { Neutral, Empathetic };

inline constexpr std::string_view to_string(Variant v) noexcept {
  return v == Variant::Neutral ? "neutral" : "empathetic";
}

struct RenderedTemplate {
  std::string id;  // "<name>.<variant>#<index>"
  std::string text;
};

class TemplateBook {
 public:
  static TemplateBook parse(std::string_view document) {
    TemplateBook book;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= document.size()) {
      auto nl = document.find('\n', pos);
      if (nl == std::string_view::npos) nl = document.size();
      const auto line = text::trim(document.substr(pos, nl - pos));
      pos = nl + 1;
      ++line_no;
      if (line.empty() || line.front() == '#') continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
        section = std::string(text::trim(line.substr(1, line.size() - 2)));
        if (section.find('.') == std::string::npos) {
          throw ParseError(line_no, "section must be <name>.<variant>");
        }
        const auto variant = section.substr(section.rfind('.') + 1);
        if (variant != "neutral" && variant != "empathetic") {
          throw ParseError(line_no, "unknown variant: " + variant);
        }
        continue;
      }
      if (section.empty()) throw ParseError(line_no, "entry outside a section");
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = \"string\"");
      const auto key = text::trim(line.substr(0, eq));
      std::size_t index = 0;
      try {
        std::size_t used = 0;
        index = std::stoul(std::string(key), &used);
        if (used != key.size()) throw std::invalid_argument("key");
      } catch (const std::exception&) {
        throw ParseError(line_no, "keys must be rotation indices");
      }
      auto& entries = book.sections_[section];
      if (entries.count(index)) throw ParseError(line_no, "duplicate index in [" + section + "]");
      entries[index] = parse_string(text::trim(line.substr(eq + 1)), line_no);
    }
    for (const auto& [name, entries] : book.sections_) {
      // Indices must be 0..n-1 so rotation is well defined.
      std::size_t expect = 0;
      for (const auto& [idx, s] : entries) {
        if (idx != expect++) throw ParseError(0, "[" + name + "] indices must be contiguous from 0");
      }
    }
    return book;
  }

  static TemplateBook load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::NotFound, "cannot open templates " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  bool has(std::string_view name) const {
    return sections_.count(std::string(name) + ".neutral") > 0;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [section, e] : sections_) {
      const auto dot = section.rfind('.');
      if (section.substr(dot + 1) == "neutral") out.push_back(section.substr(0, dot));
    }
    return out;
  }

  std::size_t rotation_size(std::string_view name, Variant v) const {
    auto it = sections_.find(std::string(name) + "." + std::string(to_string(v)));
    return it == sections_.end() ? 0 : it->second.size();
  }

  // Picks entry (day - 1) mod n of the variant, falling back to the neutral
  // section when the variant has none, and substitutes {placeholders}.
  RenderedTemplate render(std::string_view name, Variant v, int day,
                          const std::map<std::string, std::string>& vars = {}) const {
    auto it = sections_.find(std::string(name) + "." + std::string(to_string(v)));
    if (it == sections_.end()) {
      v = Variant::Neutral;
      it = sections_.find(std::string(name) + ".neutral");
    }
    if (it == sections_.end() || it->second.empty()) {
      fail(ErrorKind::NotFound, "missing template: " + std::string(name));
    }
    const auto n = it->second.size();
    const auto index = static_cast<std::size_t>(day > 0 ? day - 1 : 0) % n;
    return {std::string(name) + "." + std::string(to_string(v)) + "#" + std::to_string(index),
            substitute(it->second.at(index), vars)};
  }

 private:
  static std::string substitute(const std::string& s, const std::map<std::string, std::string>& vars) {
    std::string out;
    std::size_t pos = 0;
    while (pos < s.size()) {
      const auto open = s.find('{', pos);
      if (open == std::string::npos) break;
      const auto close = s.find('}', open);
      if (close == std::string::npos) break;
      out.append(s, pos, open - pos);
      const auto key = s.substr(open + 1, close - open - 1);
      if (auto v = vars.find(key); v != vars.end()) {
        out += v->second;
      } else {
        out.append(s, open, close - open + 1);
      }
      pos = close + 1;
    }
    out.append(s, pos, std::string::npos);
    return out;
  }

  static std::string parse_string(std::string_view v, std::size_t line_no) {
    if (v.size() < 2 || v.front() != '"' || v.back() != '"') {
      throw ParseError(line_no, "value must be a double-quoted string");
    }
    v = v.substr(1, v.size() - 2);
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == '"') throw ParseError(line_no, "unescaped quote");
      if (v[i] != '\\') {
        out.push_back(v[i]);
        continue;
      }
      if (++i >= v.size()) throw ParseError(line_no, "dangling escape");
      switch (v[i]) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'u': {
          if (i + 4 >= v.size()) throw ParseError(line_no, "short \\u escape");
          const std::string hex(v.substr(i + 1, 4));
          if (hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
            throw ParseError(line_no, "bad \\u escape");
          }
          text::append_utf8(out, static_cast<char32_t>(std::stoul(hex, nullptr, 16)));
          i += 4;
          break;
        }
        default: throw ParseError(line_no, "unknown escape");
      }
    }
    return out;
  }

  std::map<std::string, std::map<std::size_t, std::string>> sections_;
};

}  // namespace nora::dialogue
