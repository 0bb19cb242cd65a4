#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nora/error.hpp"
#include "nora/text.hpp"

namespace nora {

enum class Language { EN, ZH };

inline constexpr std::string_view to_string(Language l) noexcept {
  return l == Language::EN ? "en" : "zh";
}

inline Language parse_language(std::string_view s) {
  const auto lower = text::lower_ascii(s);
  if (lower == "en") return Language::EN;
  if (lower == "zh") return Language::ZH;
  fail(ErrorKind::InvalidInput, "unsupported language: " + std::string(s));
}

}  // namespace nora

namespace nora::nlu {

enum class Source { Typed, SpeechAdapter };

struct Utterance {
  std::string text;
  Language language = Language::EN;
  Source source = Source::Typed;

  // Rejects text that is empty after trimming.
  static Utterance make(std::string text, Language language,
                        Source source = Source::Typed) {
    if (text::is_blank(text)) fail(ErrorKind::InvalidInput, "empty utterance");
    return Utterance{std::move(text), language, source};
  }
};

struct PatternElement {
  enum class Kind { Literal, Slot };
  Kind kind;
  std::string text;  // token for literals, placeholder name for slots
  // Slots only: when non-empty, the binding must end in one of these words.
  std::vector<std::string> allowed_heads;
};

struct Pattern {
  std::string source;
  std::vector<PatternElement> elements;

  bool is_template() const {
    for (const auto& e : elements) {
      if (e.kind == PatternElement::Kind::Slot) return true;
    }
    return false;
  }
};

struct IntentRule {
  std::string id;
  std::string intent;
  Language language = Language::EN;
  std::vector<Pattern> patterns;
  int priority = 0;
};

inline void constrain_slot(IntentRule& rule, const std::string& slot, std::vector<std::string> heads) {
  for (auto& p : rule.patterns) {
    for (auto& e : p.elements) {
      if (e.kind == PatternElement::Kind::Slot && e.text == slot) e.allowed_heads = heads;
    }
  }
}

inline constexpr double kLiteralConfidence = 1.0;
inline constexpr double kTemplateConfidence = 0.8;
inline constexpr std::string_view kFallbackIntent = "fallback";

struct SlotBinding {
  std::string raw;    // exact substring of the utterance
  std::string value;  // after determiner stripping
  std::size_t begin = 0;  // byte span of `raw`
  std::size_t end = 0;
};

using SlotMap = std::map<std::string, SlotBinding>;

struct IntentFrame {
  std::string intent{kFallbackIntent};
  std::map<std::string, std::string> slots;  // normalized values
  double confidence = 0.0;
  std::optional<std::string> matched_rule;

  static IntentFrame fallback() { return {}; }

  static IntentFrame synthetic(std::string intent) {
    IntentFrame f;
    f.intent = std::move(intent);
    f.confidence = kLiteralConfidence;
    f.matched_rule = "synthetic";
    return f;
  }

  bool is_fallback() const { return !matched_rule.has_value(); }

  friend bool operator==(const IntentFrame&, const IntentFrame&) = default;
};

inline void to_json(nlohmann::json& j, const IntentFrame& f) {
  j = nlohmann::json{{"intent", f.intent},
                     {"slots", f.slots},
                     {"confidence", f.confidence},
                     {"matched_rule", f.matched_rule ? nlohmann::json(*f.matched_rule) : nlohmann::json()}};
}

inline void from_json(const nlohmann::json& j, IntentFrame& f) {
  f.intent = j.at("intent").get<std::string>();
  f.slots = j.at("slots").get<std::map<std::string, std::string>>();
  f.confidence = j.at("confidence").get<double>();
  f.matched_rule = j.at("matched_rule").is_null() ? std::nullopt
                                                  : std::optional<std::string>(j.at("matched_rule").get<std::string>());
}

}  // namespace nora::nlu
