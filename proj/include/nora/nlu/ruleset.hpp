#pragma once

// Ruleset files are JSON Lines: one rule object per line,
//   {"intent": "affirm", "lang": "en", "priority": 10, "patterns": ["yes", "sure"]}
// Blank lines and lines starting with '#' are ignored. A pattern without
// braces is a literal phrase (confidence 1.0); one with {name} placeholders
// is a template (confidence 0.8). An optional "slot_values" object limits a
// placeholder to bindings that end in one of the listed words:
//   "slot_values": {"object": ["parents", "mom", "dad"]}

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nora/nlu/pattern.hpp"

namespace nora::nlu {

inline std::vector<IntentRule> load_ruleset(std::string_view document) {
  using nlohmann::json;
  std::vector<IntentRule> rules;
  std::set<std::pair<std::string, std::string>> seen;  // (intent, pattern)
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= document.size()) {
    auto nl = document.find('\n', pos);
    if (nl == std::string_view::npos) nl = document.size();
    const auto line = text::trim(document.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) throw ParseError(line_no, "malformed JSON record");
    if (!rec.is_object()) throw ParseError(line_no, "record must be an object");
    for (const char* field : {"intent", "lang", "priority", "patterns"}) {
      if (!rec.contains(field)) throw ParseError(line_no, std::string("missing field '") + field + "'");
    }
    if (!rec["intent"].is_string() || !rec["lang"].is_string() ||
        !rec["priority"].is_number_integer() || !rec["patterns"].is_array()) {
      throw ParseError(line_no, "field of the wrong type");
    }

    IntentRule rule;
    rule.intent = rec["intent"].get<std::string>();
    try {
      rule.language = parse_language(rec["lang"].get<std::string>());
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    rule.priority = rec["priority"].get<int>();
    rule.id = std::string(to_string(rule.language)) + ":" + rule.intent + "@" + std::to_string(line_no);
    auto invalid = [&](const std::string& what) {
      return Error(ErrorKind::InvalidInput, "line " + std::to_string(line_no) + ": " + what);
    };
    if (rule.intent.empty() || rule.intent == kFallbackIntent) throw invalid("reserved or empty intent");
    if (rule.priority < 0) throw invalid("priority must be >= 0");
    for (const auto& p : rec["patterns"]) {
      if (!p.is_string()) throw ParseError(line_no, "patterns must be strings");
      const auto src = p.get<std::string>();
      try {
        rule.patterns.push_back(compile_pattern(src));
      } catch (const Error& e) {
        throw invalid(e.what());
      }
      if (!seen.emplace(rule.intent, src).second) {
        throw invalid("duplicate pattern '" + src + "' for intent " + rule.intent);
      }
    }
    if (rule.patterns.empty()) throw invalid("rule has no patterns");
    if (rec.contains("slot_values")) {
      if (!rec["slot_values"].is_object()) throw ParseError(line_no, "slot_values must be an object");
      for (const auto& [slot, words] : rec["slot_values"].items()) {
        if (!words.is_array()) throw ParseError(line_no, "slot_values entries must be arrays");
        std::vector<std::string> heads;
        for (const auto& w : words) {
          if (!w.is_string()) throw ParseError(line_no, "slot_values entries must be strings");
          auto toks = text::word_tokens(w.get<std::string>());
          if (toks.empty()) throw invalid("empty slot value");
          heads.push_back(detail::join_tokens(toks, 0, toks.size()));
        }
        bool used = false;
        for (const auto& p : rule.patterns) {
          for (const auto& e : p.elements) used = used || (e.kind == PatternElement::Kind::Slot && e.text == slot);
        }
        if (!used) throw invalid("slot_values names unknown placeholder {" + slot + "}");
        constrain_slot(rule, slot, std::move(heads));
      }
    }
    rules.push_back(std::move(rule));
  }
  std::stable_sort(rules.begin(), rules.end(),
                   [](const IntentRule& a, const IntentRule& b) { return a.priority > b.priority; });
  return rules;
}

inline std::vector<IntentRule> load_ruleset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::NotFound, "cannot open ruleset " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_ruleset(ss.str());
}

}  // namespace nora::nlu
