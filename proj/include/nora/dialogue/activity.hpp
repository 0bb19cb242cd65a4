#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nora/error.hpp"

namespace nora::dialogue {

using nlohmann::json;

enum class ActivityKind { Exercise, Yoga, Meditation };

inline constexpr std::string_view to_string(ActivityKind k) noexcept {
  switch (k) {
    case ActivityKind::Exercise: return "exercise";
    case ActivityKind::Yoga: return "yoga";
    case ActivityKind::Meditation: return "meditation";
  }
  return "exercise";
}

inline ActivityKind parse_activity_kind(std::string_view s) {
  if (s == "exercise") return ActivityKind::Exercise;
  if (s == "yoga") return ActivityKind::Yoga;
  if (s == "meditation") return ActivityKind::Meditation;
  fail(ErrorKind::InvalidInput, "unknown activity kind: " + std::string(s));
}

struct ActivityRecommendation {
  ActivityKind kind = ActivityKind::Exercise;
  std::string video;
  int day = 1;

  friend bool operator==(const ActivityRecommendation&, const ActivityRecommendation&) = default;
};

struct DayActivity {
  ActivityKind kind;
  std::string video;
  friend bool operator==(const DayActivity&, const DayActivity&) = default;
};

struct ActivityPreferences {
  std::vector<ActivityKind> kinds;   // rotation order; empty = all kinds
  std::map<int, DayActivity> by_day; // videos the user picked for given days
  friend bool operator==(const ActivityPreferences&, const ActivityPreferences&) = default;
};

inline std::string default_video(ActivityKind kind, int day) {
  return "videos/" + std::string(to_string(kind)) + "/day-" + std::to_string(day);
}

// A video set for the day wins; otherwise kinds rotate round-robin by day.
inline ActivityRecommendation recommend_activity(const ActivityPreferences& prefs, int day) {
  if (day < 1) fail(ErrorKind::InvalidInput, "day must be >= 1");
  if (auto it = prefs.by_day.find(day); it != prefs.by_day.end()) {
    return {it->second.kind, it->second.video, day};
  }
  static const std::vector<ActivityKind> all = {ActivityKind::Exercise, ActivityKind::Yoga,
                                                ActivityKind::Meditation};
  const auto& kinds = prefs.kinds.empty() ? all : prefs.kinds;
  const auto kind = kinds[static_cast<std::size_t>(day - 1) % kinds.size()];
  return {kind, default_video(kind, day), day};
}

inline void to_json(json& j, const ActivityRecommendation& a) {
  j = json{{"kind", to_string(a.kind)}, {"video", a.video}, {"day", a.day}};
}

inline void from_json(const json& j, ActivityRecommendation& a) {
  a.kind = parse_activity_kind(j.at("kind").get<std::string>());
  a.video = j.at("video").get<std::string>();
  a.day = j.at("day").get<int>();
}

inline void to_json(json& j, const ActivityPreferences& p) {
  json kinds = json::array();
  for (auto k : p.kinds) kinds.push_back(to_string(k));
  json days = json::object();
  for (const auto& [day, act] : p.by_day) {
    days[std::to_string(day)] = json{{"kind", to_string(act.kind)}, {"video", act.video}};
  }
  j = json{{"kinds", kinds}, {"by_day", days}};
}

inline void from_json(const json& j, ActivityPreferences& p) {
  p = {};
  if (j.contains("kinds")) {
    for (const auto& k : j.at("kinds")) p.kinds.push_back(parse_activity_kind(k.get<std::string>()));
  }
  if (j.contains("by_day")) {
    for (const auto& [day, act] : j.at("by_day").items()) {
      int d = 0;
      try {
        d = std::stoi(day);
      } catch (const std::exception&) {
        fail(ErrorKind::InvalidInput, "activity preference day must be an integer");
      }
      if (d < 1) fail(ErrorKind::InvalidInput, "activity preference day must be >= 1");
      p.by_day[d] = {parse_activity_kind(act.at("kind").get<std::string>()),
                     act.at("video").get<std::string>()};
    }
  }
}

}  // namespace nora::dialogue
