#pragma once

// Persists sessions in the "sessions" collection (key <user>/<day>) and,
// once a session reaches End, writes the day's health record and summary.

#include <mutex>
#include <unordered_map>

#include "nora/dialogue/summary.hpp"
#include "nora/store/schema.hpp"

namespace nora::dialogue {

struct TurnResult {
  BotResponse response;
  SessionState state;
  std::optional<SessionSummary> summary;  // set on the turn that ends the session
};

class SessionService {
 public:
  SessionService(store::DocumentStore& store, const DialogueManager& manager)
      : store_(store), manager_(manager) {}

  // Opens the session for (user, day). One session per user and day.
  BotResponse start(const std::string& user, int day, Language lang, ActivityPreferences prefs,
                    int program_length) {
    if (day < 1 || day > program_length) {
      fail(ErrorKind::InvalidInput, "day " + std::to_string(day) + " outside program of " +
                                        std::to_string(program_length) + " days");
    }
    auto lock = lock_user(user);
    if (current(user)) fail(ErrorKind::Conflict, "another session is still open");
    auto [state, response] = manager_.start_session(user, day, lang, std::move(prefs));
    const auto key = store::day_key(user, day);
    if (!store_.compare_and_put("sessions", key, store::kAbsent, document(state, true))) {
      fail(ErrorKind::Conflict, "session for day " + std::to_string(day) + " already exists");
    }
    return response;
  }

  TurnResult turn(const std::string& user, const std::string& text, const nlu::IntentFrame& frame,
                  const std::optional<empathy::EmpathyScores>& scores, int program_length) {
    auto lock = lock_user(user);
    auto doc = current(user);
    if (!doc) fail(ErrorKind::InvalidState, "no open session");
    auto state = doc->body.at("state").get<SessionState>();
    auto [next, response] = manager_.advance(std::move(state), text, frame, scores);
    TurnResult result{std::move(response), std::move(next), std::nullopt};
    const bool ended = result.state.phase == Phase::End;
    if (!store_.compare_and_put("sessions", doc->key, doc->version, document(result.state, !ended))) {
      fail(ErrorKind::Conflict, "session changed concurrently");
    }
    if (ended) {
      auto summary = close_session(result.state);
      summary.health = screening::record_day(store_, user, summary.health, program_length);
      json body = summary;
      store_.put("summaries", store::day_key(user, summary.day), std::move(body));
      result.summary = std::move(summary);
    }
    return result;
  }

  std::optional<SessionState> open_session(const std::string& user) const {
    auto doc = current(user);
    if (!doc) return std::nullopt;
    return doc->body.at("state").get<SessionState>();
  }

  std::optional<SessionState> load(const std::string& user, int day) const {
    auto doc = store_.get("sessions", store::day_key(user, day));
    if (!doc) return std::nullopt;
    return doc->body.at("state").get<SessionState>();
  }

  std::vector<SessionSummary> summaries(const std::string& user) const {
    std::vector<SessionSummary> out;
    for (const auto& d : store_.query("summaries", {{{"user", user}}, "day"})) {
      out.push_back(d.body.get<SessionSummary>());
    }
    return out;
  }

 private:
  static json document(const SessionState& s, bool open) {
    return json{{"user", s.user}, {"day", s.day}, {"open", open}, {"state", s}};
  }

  std::optional<store::Document> current(const std::string& user) const {
    for (auto& d : store_.query("sessions", {{{"user", user}}, "day"})) {
      if (d.body.value("open", false)) return std::move(d);
    }
    return std::nullopt;
  }

  std::unique_lock<std::mutex> lock_user(const std::string& user) {
    std::lock_guard guard(registry_mutex_);
    auto& m = user_mutexes_[user];
    if (!m) m = std::make_unique<std::mutex>();
    return std::unique_lock<std::mutex>(*m);
  }

  store::DocumentStore& store_;
  const DialogueManager& manager_;
  std::mutex registry_mutex_;
  std::unordered_map<std::string, std::unique_ptr<std::mutex>> user_mutexes_;
};

}  // namespace nora::dialogue
