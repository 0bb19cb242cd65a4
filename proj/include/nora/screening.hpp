#pragma once

// Daily health screening: temperature bands, the count-in-one-breath test,
// escalation and the per-day record.

#include <cmath>
#include <optional>

#include "nora/nlu/numbers.hpp"
#include "nora/store/schema.hpp"

namespace nora::screening {

using nlohmann::json;

enum class TemperatureClass { Normal, High, Invalid };

inline constexpr std::string_view to_string(TemperatureClass c) noexcept {
  switch (c) {
    case TemperatureClass::Normal: return "normal";
    case TemperatureClass::High: return "high";
    case TemperatureClass::Invalid: return "invalid";
  }
  return "invalid";
}

inline TemperatureClass parse_temperature_class(std::string_view s) {
  if (s == "normal") return TemperatureClass::Normal;
  if (s == "high") return TemperatureClass::High;
  if (s == "invalid") return TemperatureClass::Invalid;
  fail(ErrorKind::InvalidInput, "unknown temperature class: " + std::string(s));
}

inline constexpr double kNormalLow = 32.0;   // inclusive
inline constexpr double kHighLow = 38.0;     // inclusive, fever onset
inline constexpr double kHighUpper = 43.0;   // inclusive

// [32, 38) Normal, [38, 43] High, anything else Invalid.
inline TemperatureClass classify_temperature(double celsius) {
  if (!std::isfinite(celsius)) fail(ErrorKind::InvalidInput, "temperature must be finite");
  if (celsius >= kNormalLow && celsius < kHighLow) return TemperatureClass::Normal;
  if (celsius >= kHighLow && celsius <= kHighUpper) return TemperatureClass::High;
  return TemperatureClass::Invalid;
}

struct BreathTestResult {
  int max_count = 0;
  bool self_report_short = false;

  friend bool operator==(const BreathTestResult&, const BreathTestResult&) = default;
};

struct BreathEvaluation {
  BreathTestResult result;
  bool reask = false;  // the follow-up answer was not understood
};

// `follow_up_intent` is the intent of the answer to "do you feel out of
// breath?": affirm, deny or fallback. Fallback reads as deny and asks again.
inline BreathEvaluation evaluate_breath(const nlu::Utterance& counting,
                                        std::string_view follow_up_intent) {
  if (follow_up_intent != "affirm" && follow_up_intent != "deny" &&
      follow_up_intent != nlu::kFallbackIntent) {
    fail(ErrorKind::InvalidInput, "unexpected follow-up intent: " + std::string(follow_up_intent));
  }
  BreathEvaluation out;
  const auto count = nlu::parse_count(counting);
  if (count && *count > 0) out.result.max_count = static_cast<int>(std::floor(*count));
  out.result.self_report_short = follow_up_intent == "affirm";
  out.reask = follow_up_intent == nlu::kFallbackIntent;
  return out;
}

struct HealthRecord {
  int day = 1;
  std::optional<double> temperature;
  TemperatureClass temp_class = TemperatureClass::Invalid;
  std::optional<BreathTestResult> breath;
  bool escalated = false;
  bool flagged = false;  // a reading was given up on or declined

  friend bool operator==(const HealthRecord&, const HealthRecord&) = default;
};

// Fever or self-reported shortness of breath.
inline bool needs_escalation(const HealthRecord& r) {
  if (!r.temperature && !r.breath) {
    fail(ErrorKind::InvalidInput, "health record has neither temperature nor breath");
  }
  return r.temp_class == TemperatureClass::High || (r.breath && r.breath->self_report_short);
}

inline void to_json(json& j, const HealthRecord& r) {
  j = json{{"day", r.day},
           {"temperature", r.temperature ? json(*r.temperature) : json()},
           {"temp_class", to_string(r.temp_class)},
           {"breath", r.breath ? json{{"max_count", r.breath->max_count},
                                      {"self_report_short", r.breath->self_report_short}}
                               : json()},
           {"escalated", r.escalated},
           {"flagged", r.flagged}};
}

inline void from_json(const json& j, HealthRecord& r) {
  r.day = j.at("day").get<int>();
  r.temperature = j.at("temperature").is_null() ? std::nullopt
                                                 : std::optional<double>(j.at("temperature").get<double>());
  r.temp_class = parse_temperature_class(j.at("temp_class").get<std::string>());
  if (j.at("breath").is_null()) {
    r.breath.reset();
  } else {
    r.breath = BreathTestResult{j.at("breath").at("max_count").get<int>(),
                                j.at("breath").at("self_report_short").get<bool>()};
  }
  r.escalated = j.at("escalated").get<bool>();
  r.flagged = j.value("flagged", false);
}

// Upserts the record for (user, day). `escalated` is recomputed from the
// record's facts when any reading is present.
inline HealthRecord record_day(store::DocumentStore& store, const std::string& user,
                               HealthRecord record, int program_length) {
  if (record.day < 1 || record.day > program_length) {
    fail(ErrorKind::InvalidInput, "day " + std::to_string(record.day) + " outside program of " +
                                      std::to_string(program_length) + " days");
  }
  record.escalated = (record.temperature || record.breath) && needs_escalation(record);
  json body = record;
  body["user"] = user;
  store.put("health", store::day_key(user, record.day), std::move(body));
  return record;
}

inline std::vector<HealthRecord> history(const store::DocumentStore& store, const std::string& user) {
  std::vector<HealthRecord> out;
  for (const auto& doc : store.query("health", {{{"user", user}}, "day"})) {
    out.push_back(doc.body.get<HealthRecord>());
  }
  return out;
}

}  // namespace nora::screening
