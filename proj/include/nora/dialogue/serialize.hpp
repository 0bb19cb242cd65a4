#pragma once

#include "nora/dialogue/session.hpp"

namespace nora::dialogue {

inline void to_json(json& j, const Directive& d) {
  j = json{{"kind", to_string(d.kind)}};
  if (d.activity) j["activity"] = *d.activity;
  if (d.hotline) j["hotline"] = *d.hotline;
}

inline void to_json(json& j, const BotResponse& r) {
  j = json{{"text", r.text},
           {"directive", r.directive},
           {"empathy_echo", r.empathy_echo ? json(*r.empathy_echo) : json()},
           {"phase", to_string(r.phase)},
           {"variant", to_string(r.variant)},
           {"templates", r.template_ids}};
}

inline void to_json(json& j, const Turn& t) {
  j = json{{"speaker", t.speaker == Speaker::User ? "user" : "bot"}, {"text", t.text}};
  j["frame"] = t.frame ? json(*t.frame) : json();
  j["scores"] = t.scores ? json(*t.scores) : json();
}

inline void from_json(const json& j, Turn& t) {
  t.speaker = j.at("speaker").get<std::string>() == "user" ? Speaker::User : Speaker::Bot;
  t.text = j.at("text").get<std::string>();
  t.frame = j.at("frame").is_null() ? std::nullopt
                                    : std::optional<nlu::IntentFrame>(j.at("frame").get<nlu::IntentFrame>());
  t.scores = j.at("scores").is_null()
                 ? std::nullopt
                 : std::optional<empathy::EmpathyScores>(j.at("scores").get<empathy::EmpathyScores>());
}

inline void to_json(json& j, const SessionState& s) {
  j = json{{"user", s.user},
           {"day", s.day},
           {"language", to_string(s.language)},
           {"phase", to_string(s.phase)},
           {"turns", s.turns},
           {"facts", s.facts},
           {"retry_count", s.retry_count},
           {"hotline_shown", s.hotline_shown},
           {"offer", s.offer ? json(*s.offer) : json()},
           {"preferences", s.preferences}};
}

inline void from_json(const json& j, SessionState& s) {
  s.user = j.at("user").get<std::string>();
  s.day = j.at("day").get<int>();
  s.language = parse_language(j.at("language").get<std::string>());
  s.phase = parse_phase(j.at("phase").get<std::string>());
  s.turns = j.at("turns").get<std::vector<Turn>>();
  s.facts = j.at("facts");
  s.retry_count = j.at("retry_count").get<int>();
  s.hotline_shown = j.at("hotline_shown").get<bool>();
  s.offer = j.at("offer").is_null() ? std::nullopt
                                    : std::optional<ActivityRecommendation>(j.at("offer").get<ActivityRecommendation>());
  s.preferences = j.at("preferences").get<ActivityPreferences>();
}

}  // namespace nora::dialogue
