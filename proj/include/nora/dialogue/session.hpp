#pragma once

// The daily session state machine. The agent asks, the user answers:
//
//   Intro (day 1) | FuturePlans (day > 1)
//     -> Mood -> Temperature -> Breath -> Gratitude -> ActivityOffer
//     -> [ActivityRunning] -> Feedback -> End
//
// Temperature re-asks on an invalid or missing reading, Breath takes a
// counting turn and then an out-of-breath follow-up, and yes/no questions
// re-ask on answers that were not understood. Every re-ask is bounded by
// kRetryLimit so each session ends.

#include <array>
#include <map>
#include <optional>

#include "nora/dialogue/activity.hpp"
#include "nora/dialogue/templates.hpp"
#include "nora/empathy/types.hpp"
#include "nora/nlu/types.hpp"
#include "nora/screening.hpp"

namespace nora::dialogue {

enum class Phase {
  Intro,
  FuturePlans,
  Mood,
  Temperature,
  Breath,
  Gratitude,
  ActivityOffer,
  ActivityRunning,
  Feedback,
  End
};

inline constexpr std::array<Phase, 10> kAllPhases = {
    Phase::Intro,     Phase::FuturePlans,   Phase::Mood,            Phase::Temperature,
    Phase::Breath,    Phase::Gratitude,     Phase::ActivityOffer,   Phase::ActivityRunning,
    Phase::Feedback,  Phase::End};

inline constexpr std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Intro: return "intro";
    case Phase::FuturePlans: return "future_plans";
    case Phase::Mood: return "mood";
    case Phase::Temperature: return "temperature";
    case Phase::Breath: return "breath";
    case Phase::Gratitude: return "gratitude";
    case Phase::ActivityOffer: return "activity_offer";
    case Phase::ActivityRunning: return "activity_running";
    case Phase::Feedback: return "feedback";
    case Phase::End: return "end";
  }
  return "end";
}

inline Phase parse_phase(std::string_view s) {
  for (auto p : kAllPhases) {
    if (to_string(p) == s) return p;
  }
  fail(ErrorKind::InvalidInput, "unknown phase: " + std::string(s));
}

// Allowed transitions (self-loops are re-asks).
inline bool is_edge(Phase from, Phase to) {
  switch (from) {
    case Phase::Intro:
    case Phase::FuturePlans: return to == Phase::Mood;
    case Phase::Mood: return to == Phase::Temperature;
    case Phase::Temperature: return to == Phase::Temperature || to == Phase::Breath;
    case Phase::Breath: return to == Phase::Breath || to == Phase::Gratitude;
    case Phase::Gratitude: return to == Phase::ActivityOffer;
    case Phase::ActivityOffer:
      return to == Phase::ActivityOffer || to == Phase::ActivityRunning || to == Phase::Feedback;
    case Phase::ActivityRunning: return to == Phase::ActivityRunning || to == Phase::Feedback;
    case Phase::Feedback: return to == Phase::End;
    case Phase::End: return false;
  }
  return false;
}

inline constexpr int kRetryLimit = 3;

enum class DirectiveKind { None, ShowActivity, ShowHotline, EndSession, RequestNumber, RequestCount };

inline constexpr std::string_view to_string(DirectiveKind d) noexcept {
  switch (d) {
    case DirectiveKind::None: return "none";
    case DirectiveKind::ShowActivity: return "show_activity";
    case DirectiveKind::ShowHotline: return "show_hotline";
    case DirectiveKind::EndSession: return "end_session";
    case DirectiveKind::RequestNumber: return "request_number";
    case DirectiveKind::RequestCount: return "request_count";
  }
  return "none";
}

struct Directive {
  DirectiveKind kind = DirectiveKind::None;
  std::optional<ActivityRecommendation> activity;  // ShowActivity
  std::optional<std::string> hotline;              // ShowHotline
};

struct BotResponse {
  std::string text;
  Directive directive;
  std::optional<empathy::EmpathyScores> empathy_echo;
  Phase phase = Phase::Intro;        // phase after this response
  std::vector<std::string> template_ids;
  Variant variant = Variant::Neutral;
};

enum class Speaker { User, Bot };

struct Turn {
  Speaker speaker = Speaker::Bot;
  std::string text;
  std::optional<nlu::IntentFrame> frame;
  std::optional<empathy::EmpathyScores> scores;
};

struct SessionState {
  std::string user;
  int day = 1;
  Language language = Language::EN;
  Phase phase = Phase::Intro;
  std::vector<Turn> turns;
  json facts = json::object();
  int retry_count = 0;
  bool hotline_shown = false;
  std::optional<ActivityRecommendation> offer;
  ActivityPreferences preferences;
};

struct DialogueConfig {
  double stress_threshold = 0.5;
  std::string hotline = "1833 111";
};

// Empathetic wording when the user sounds negative or stressed.
inline Variant select_variant(const std::optional<empathy::EmpathyScores>& scores, double stress_threshold) {
  if (!scores) return Variant::Neutral;
  if (scores->sentiment.label == empathy::Polarity::Negative) return Variant::Empathetic;
  if (scores->stress.value > stress_threshold) return Variant::Empathetic;
  return Variant::Neutral;
}

// Facts gathered in a session mapped onto the day's health record.
inline screening::HealthRecord health_record_from_facts(const SessionState& s) {
  screening::HealthRecord r;
  r.day = s.day;
  if (s.facts.contains("temperature")) {
    const auto& t = s.facts["temperature"];
    if (!t.at("celsius").is_null()) r.temperature = t.at("celsius").get<double>();
    r.temp_class = screening::parse_temperature_class(t.at("class").get<std::string>());
    r.flagged = r.flagged || t.value("flagged", false);
  }
  if (s.facts.contains("breath")) {
    const auto& b = s.facts["breath"];
    if (b.value("declined", false)) {
      r.flagged = true;
    } else if (!b.value("pending", false)) {
      r.breath = screening::BreathTestResult{b.at("max_count").get<int>(),
                                             b.at("self_report_short").get<bool>()};
    }
  }
  r.escalated = (r.temperature || r.breath) && screening::needs_escalation(r);
  return r;
}

class DialogueManager {
 public:
  DialogueManager(std::map<Language, TemplateBook> templates, DialogueConfig config)
      : templates_(std::move(templates)), config_(std::move(config)) {}

  const DialogueConfig& config() const { return config_; }

  const TemplateBook& templates(Language lang) const {
    auto it = templates_.find(lang);
    if (it == templates_.end()) fail(ErrorKind::InvalidInput, "no templates for language");
    return it->second;
  }

  std::pair<SessionState, BotResponse> start_session(const std::string& user, int day, Language lang,
                                                     ActivityPreferences prefs = {}) const {
    if (day < 1) fail(ErrorKind::InvalidInput, "day must be >= 1");
    SessionState s;
    s.user = user;
    s.day = day;
    s.language = lang;
    s.preferences = std::move(prefs);
    s.phase = day == 1 ? Phase::Intro : Phase::FuturePlans;
    Reply r(*this, s, std::nullopt);
    r.say(day == 1 ? "intro" : "future_plans");
    return {std::move(s), r.finish(s)};
  }

  // Applies one user turn. The state is taken by value and returned updated.
  std::pair<SessionState, BotResponse> advance(SessionState s, const std::string& user_text,
                                               const nlu::IntentFrame& frame,
                                               const std::optional<empathy::EmpathyScores>& scores) const {
    if (s.phase == Phase::End) fail(ErrorKind::InvalidState, "session has ended");
    s.turns.push_back({Speaker::User, user_text, frame, scores});
    Reply r(*this, s, scores);
    const auto& intent = frame.intent;

    switch (s.phase) {
      case Phase::Intro:
      case Phase::FuturePlans:
        move_to(s, Phase::Mood);
        r.say("mood");
        break;

      case Phase::Mood: {
        json mood{{"intent", intent}, {"text", user_text}};
        if (scores) mood["sentiment"] = to_string(scores->sentiment.label);
        s.facts["mood"] = std::move(mood);
        move_to(s, Phase::Temperature);
        r.say("temperature");
        r.direct(DirectiveKind::RequestNumber);
        break;
      }

      case Phase::Temperature: {
        const auto reading = nlu::parse_number(nlu::Utterance{user_text, s.language});
        const auto cls = reading ? screening::classify_temperature(*reading)
                                 : screening::TemperatureClass::Invalid;
        if (cls != screening::TemperatureClass::Invalid) {
          s.facts["temperature"] = json{{"celsius", *reading}, {"class", to_string(cls)},
                                        {"attempts", s.retry_count + 1}};
          move_to(s, Phase::Breath);
          r.say("breath_count");
          r.direct(DirectiveKind::RequestCount);
        } else if (++s.retry_count < kRetryLimit) {
          r.say("temperature_retry");
          r.direct(DirectiveKind::RequestNumber);
        } else {
          s.facts["temperature"] = json{{"celsius", nullptr}, {"class", "invalid"},
                                        {"attempts", s.retry_count}, {"flagged", true}};
          move_to(s, Phase::Breath);
          r.say("temperature_giveup");
          r.say("breath_count");
          r.direct(DirectiveKind::RequestCount);
        }
        break;
      }

      case Phase::Breath:
        breath_turn(s, r, user_text, intent);
        break;

      case Phase::Gratitude: {
        auto obj = frame.slots.find("object");
        s.facts["gratitude_object"] = obj != frame.slots.end() ? obj->second : user_text;
        s.offer = recommend_activity(s.preferences, s.day);
        move_to(s, Phase::ActivityOffer);
        r.say("activity_offer", activity_vars(*s.offer));
        break;
      }

      case Phase::ActivityOffer: {
        const auto answer = yes_no(intent);
        if (answer == Answer::Unclear && ++s.retry_count < kRetryLimit) {
          r.say("activity_offer_retry", activity_vars(*s.offer));
        } else if (answer == Answer::Yes) {
          s.facts["chosen_activity"] = *s.offer;
          move_to(s, Phase::ActivityRunning);
          r.say("activity_start", activity_vars(*s.offer));
          r.direct(DirectiveKind::ShowActivity);
          r.response.directive.activity = s.offer;
        } else {
          s.facts["chosen_activity"] = nullptr;
          move_to(s, Phase::Feedback);
          r.say("activity_declined");
          r.say("feedback");
        }
        break;
      }

      case Phase::ActivityRunning:
        if (intent != "continue" && ++s.retry_count < kRetryLimit) {
          r.say("activity_waiting");
        } else {
          move_to(s, Phase::Feedback);
          r.say("feedback");
        }
        break;

      case Phase::Feedback:
        s.facts["feedback"] = json{{"intent", intent}, {"text", user_text}};
        move_to(s, Phase::End);
        r.say("end");
        r.direct(DirectiveKind::EndSession);
        break;

      case Phase::End:
        break;
    }
    return {std::move(s), r.finish(s)};
  }

 private:
  enum class Answer { Yes, No, Unclear };

  static Answer yes_no(const std::string& intent) {
    if (intent == "affirm") return Answer::Yes;
    if (intent == "deny") return Answer::No;
    return Answer::Unclear;
  }

  static void move_to(SessionState& s, Phase next) {
    if (!is_edge(s.phase, next)) {
      fail(ErrorKind::InvalidState, "illegal transition " + std::string(to_string(s.phase)) + " -> " +
                                        std::string(to_string(next)));
    }
    s.phase = next;
    s.retry_count = 0;
  }

  static std::map<std::string, std::string> activity_vars(const ActivityRecommendation& a) {
    return {{"activity", std::string(to_string(a.kind))}, {"video", a.video}};
  }

  // Builds a response from one or more template pieces.
  struct Reply {
    Reply(const DialogueManager& m, const SessionState& s, const std::optional<empathy::EmpathyScores>& scores)
        : book(m.templates(s.language)), day(s.day), hotline(m.config_.hotline) {
      response.empathy_echo = scores;
      response.variant = select_variant(scores, m.config_.stress_threshold);
    }

    void say(std::string_view name, std::map<std::string, std::string> vars = {}) {
      vars.emplace("hotline", hotline);
      auto t = book.render(name, response.variant, day, vars);
      if (!response.text.empty()) response.text += separator();
      response.text += t.text;
      response.template_ids.push_back(std::move(t.id));
    }

    void direct(DirectiveKind kind) { response.directive.kind = kind; }

    BotResponse finish(SessionState& s) {
      response.phase = s.phase;
      s.turns.push_back({Speaker::Bot, response.text, std::nullopt, std::nullopt});
      return std::move(response);
    }

    std::string separator() const { return " "; }

    const TemplateBook& book;
    int day;
    std::string hotline;
    BotResponse response;
  };

  void breath_turn(SessionState& s, Reply& r, const std::string& user_text, const std::string& intent) const {
    const bool awaiting_follow_up = s.facts.contains("breath") && s.facts["breath"].value("pending", false);
    if (!awaiting_follow_up) {
      const nlu::Utterance counting{user_text, s.language};
      if (intent == "deny" && !nlu::parse_count(counting)) {
        s.facts["breath"] = json{{"declined", true}};
        r.say("breath_declined");
        finish_breath(s, r);
        return;
      }
      s.facts["breath"] = json{{"pending", true}, {"count_text", user_text}};
      r.say("breath_followup");
      return;
    }
    const auto& follow = (intent == "affirm" || intent == "deny") ? intent : std::string(nlu::kFallbackIntent);
    const nlu::Utterance counting{s.facts["breath"]["count_text"].get<std::string>(), s.language};
    const auto eval = screening::evaluate_breath(counting, follow);
    if (eval.reask && ++s.retry_count < kRetryLimit) {
      r.say("breath_followup_retry");
      return;
    }
    s.facts["breath"] = json{{"pending", false},
                             {"max_count", eval.result.max_count},
                             {"self_report_short", eval.result.self_report_short}};
    finish_breath(s, r);
  }

  // Leaves Breath for Gratitude, showing the hotline when today's readings
  // call for it.
  void finish_breath(SessionState& s, Reply& r) const {
    const auto record = health_record_from_facts(s);
    move_to(s, Phase::Gratitude);
    if (record.escalated) {
      r.say("hotline");
      r.direct(DirectiveKind::ShowHotline);
      r.response.directive.hotline = config_.hotline;
      s.hotline_shown = true;
    }
    r.say("gratitude");
  }

  std::map<Language, TemplateBook> templates_;
  DialogueConfig config_;
};

}  // namespace nora::dialogue
