#pragma once

#include "nora/dialogue/serialize.hpp"

namespace nora::dialogue {

// Means over the user turns that carried empathy scores.
struct DailyAggregates {
  std::size_t scored_turns = 0;
  double sentiment_positive = 0.0;  // mean P(positive)
  double stress = 0.0;
  empathy::EmotionDistribution emotion;
};

struct SessionSummary {
  std::string user;
  int day = 1;
  std::optional<DailyAggregates> aggregates;  // absent when no turn was scored
  screening::HealthRecord health;
};

inline std::optional<DailyAggregates> aggregate_scores(const std::vector<Turn>& turns) {
  std::vector<const empathy::EmpathyScores*> scored;
  for (const auto& t : turns) {
    if (t.speaker == Speaker::User && t.scores) scored.push_back(&*t.scores);
  }
  if (scored.empty()) return std::nullopt;
  DailyAggregates a;
  a.scored_turns = scored.size();
  const auto n = static_cast<double>(scored.size());
  const auto& classes = scored.front()->emotion.classes();
  std::vector<double> emotion(classes.size(), 0.0);
  for (const auto* s : scored) {
    a.sentiment_positive += s->sentiment.positive_probability();
    a.stress += s->stress.value;
    if (s->emotion.classes() != classes) {
      fail(ErrorKind::Unprocessable, "scored turns use different emotion class sets");
    }
    for (std::size_t i = 0; i < classes.size(); ++i) emotion[i] += s->emotion.scores()[i];
  }
  a.sentiment_positive /= n;
  a.stress /= n;
  for (double& e : emotion) e /= n;
  a.emotion = empathy::EmotionDistribution::from_weights(classes, std::move(emotion));
  return a;
}

inline SessionSummary close_session(const SessionState& s) {
  if (s.phase != Phase::End) fail(ErrorKind::InvalidState, "session has not reached the end");
  return {s.user, s.day, aggregate_scores(s.turns), health_record_from_facts(s)};
}

inline void to_json(json& j, const DailyAggregates& a) {
  j = json{{"scored_turns", a.scored_turns},
           {"sentiment_positive", a.sentiment_positive},
           {"stress", a.stress},
           {"emotion", a.emotion}};
}

inline void from_json(const json& j, DailyAggregates& a) {
  a.scored_turns = j.at("scored_turns").get<std::size_t>();
  a.sentiment_positive = j.at("sentiment_positive").get<double>();
  a.stress = j.at("stress").get<double>();
  a.emotion = j.at("emotion").get<empathy::EmotionDistribution>();
}

inline void to_json(json& j, const SessionSummary& s) {
  j = json{{"user", s.user},
           {"day", s.day},
           {"aggregates", s.aggregates ? json(*s.aggregates) : json()},
           {"health", s.health}};
}

inline void from_json(const json& j, SessionSummary& s) {
  s.user = j.at("user").get<std::string>();
  s.day = j.at("day").get<int>();
  s.aggregates = j.at("aggregates").is_null() ? std::nullopt
                                              : std::optional<DailyAggregates>(j.at("aggregates").get<DailyAggregates>());
  s.health = j.at("health").get<screening::HealthRecord>();
}

}  // namespace nora::dialogue
