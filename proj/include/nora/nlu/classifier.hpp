#pragma once

#include <span>

#include "nora/nlu/pattern.hpp"

namespace nora::nlu {

namespace detail {

struct RuleHit {
  const Pattern* pattern = nullptr;
  PatternMatch match;
};

inline std::optional<RuleHit> match_rule(const IntentRule& rule,
                                         const std::vector<text::Token>& toks) {
  for (const auto& p : rule.patterns) {
    if (auto m = match_pattern(p, toks)) return RuleHit{&p, std::move(*m)};
  }
  return std::nullopt;
}

inline SlotMap bind_slots(const Utterance& u, const std::vector<text::Token>& toks,
                          const PatternMatch& m) {
  SlotMap out;
  for (const auto& [name, range] : m.bindings) {
    SlotBinding b;
    b.raw = span_text(u.text, toks, range);
    b.begin = toks[range.begin].begin;
    b.end = toks[range.end - 1].end;
    b.value = span_text(u.text, toks, strip_determiners(toks, range, u.language));
    out.emplace(name, std::move(b));
  }
  return out;
}

}  // namespace detail

// Slot bindings of the first pattern of `rule` that matches `u`.
inline SlotMap extract_slots(const Utterance& u, const IntentRule& rule) {
  const auto toks = text::word_tokens(u.text);
  auto hit = detail::match_rule(rule, toks);
  if (!hit) fail(ErrorKind::Unprocessable, "rule " + rule.id + " does not match");
  return detail::bind_slots(u, toks, hit->match);
}

// Highest-priority matching rule wins; equal priorities resolve to the rule
// that comes first in `rules`. No match yields the fallback frame.
inline IntentFrame classify(const Utterance& u, std::span<const IntentRule> rules) {
  if (text::is_blank(u.text)) fail(ErrorKind::InvalidInput, "empty utterance");
  const auto toks = text::word_tokens(u.text);
  const IntentRule* best = nullptr;
  std::optional<detail::RuleHit> best_hit;
  for (const auto& rule : rules) {
    if (rule.language != u.language) {
      fail(ErrorKind::InvalidInput, "rule " + rule.id + " is not for language " +
                                        std::string(to_string(u.language)));
    }
    if (best && rule.priority <= best->priority) continue;
    if (auto hit = detail::match_rule(rule, toks)) {
      best = &rule;
      best_hit = std::move(hit);
    }
  }
  if (!best) return IntentFrame::fallback();

  IntentFrame frame;
  frame.intent = best->intent;
  frame.matched_rule = best->id;
  frame.confidence = best_hit->pattern->is_template() ? kTemplateConfidence : kLiteralConfidence;
  for (auto& [name, b] : detail::bind_slots(u, toks, best_hit->match)) {
    frame.slots.emplace(name, std::move(b.value));
  }
  return frame;
}

}  // namespace nora::nlu
