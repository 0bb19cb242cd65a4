#pragma once

// Wires the modules into one running platform and implements the session
// pipeline: speech adapter -> nlu.classify -> empathy.score_turn ->
// dialogue.advance.

#include <memory>

#include "nora/chat.hpp"
#include "nora/dialogue.hpp"
#include "nora/empathy.hpp"
#include "nora/gateway/auth.hpp"
#include "nora/gateway/speech.hpp"
#include "nora/nlu.hpp"
#include "nora/store/file_store.hpp"

namespace nora::gateway {

struct TurnOutcome {
  nlu::IntentFrame frame;
  std::optional<empathy::EmpathyScores> scores;
  dialogue::TurnResult result;
};

// Optional collaborators; defaults are created when left empty.
struct PlatformParts {
  std::unique_ptr<store::DocumentStore> store;
  std::shared_ptr<chat::PushChannel> push;
  std::shared_ptr<chat::MeetingProvider> meetings;
  std::shared_ptr<SpeechAdapter> speech;
  SecondsClock clock = system_clock_s;
  chat::Clock chat_clock = chat::system_clock_ms;
};

inline std::unique_ptr<store::DocumentStore> open_store(const std::optional<fs::path>& data_dir) {
  if (!data_dir) return std::make_unique<store::MemoryStore>(store::platform_collections());
  return std::make_unique<store::FileStore>(*data_dir, store::platform_collections());
}

class Platform {
 public:
  Platform(PlatformConfig config, PlatformParts parts)
      : config_(std::move(config)),
        store_(parts.store ? std::move(parts.store) : open_store(std::nullopt)),
        push_(parts.push ? std::move(parts.push) : std::make_shared<chat::InProcessPushChannel>()),
        meetings_(parts.meetings ? std::move(parts.meetings)
                                 : std::make_shared<chat::SimulatedMeetingProvider>()),
        speech_(parts.speech ? std::move(parts.speech) : std::make_shared<PassthroughSpeech>()),
        rules_{{Language::EN, nlu::load_ruleset_file(config_.rules_dir / "en.rules")},
               {Language::ZH, nlu::load_ruleset_file(config_.rules_dir / "zh.rules")}},
        empathy_(empathy::EmpathyService::from_lexicons(config_.lexicon_dir, config_.empathy)),
        manager_({{Language::EN, dialogue::TemplateBook::load(config_.template_dir / "en.toml")},
                  {Language::ZH, dialogue::TemplateBook::load(config_.template_dir / "zh.toml")}},
                 dialogue::DialogueConfig{config_.stress_threshold, config_.hotline}),
        sessions_(*store_, manager_),
        chat_(*store_, *push_, config_.topics, config_.pseudonym_secret, std::move(parts.chat_clock)),
        auth_(*store_, config_.token_ttl_seconds, config_.hash_cost, std::move(parts.clock)) {}

  const PlatformConfig& config() const { return config_; }
  store::DocumentStore& store() { return *store_; }
  chat::ChatServer& chat() { return chat_; }
  chat::PushChannel& push() { return *push_; }
  chat::MeetingProvider& meetings() { return *meetings_; }
  AuthService& auth() { return auth_; }
  SpeechAdapter& speech() { return *speech_; }
  dialogue::SessionService& sessions() { return sessions_; }
  const dialogue::DialogueManager& manager() const { return manager_; }
  const empathy::EmpathyService& empathy() const { return empathy_; }

  const std::vector<nlu::IntentRule>& rules(Language lang) const { return rules_.at(lang); }

  nlu::IntentFrame understand(const nlu::Utterance& u) const { return nlu::classify(u, rules(u.language)); }

  UserProfile register_user(const Registration& r) { return auth_.register_user(r, config_.program); }

  dialogue::BotResponse start_session(const std::string& user, int day) {
    const auto p = require_user(*store_, user);
    return sessions_.start(user, day, p.language, p.activities, p.program.length_days);
  }

  TurnOutcome session_turn(const std::string& user, const std::string& text,
                           const std::optional<empathy::AudioFeatures>& audio = std::nullopt,
                           nlu::Source source = nlu::Source::Typed) {
    const auto p = require_user(*store_, user);
    const auto u = nlu::Utterance::make(text, p.language, source);
    TurnOutcome out;
    out.frame = understand(u);
    out.scores = empathy_.score_turn(u, audio);
    out.result = sessions_.turn(user, u.text, out.frame, out.scores, p.program.length_days);
    return out;
  }

  TurnOutcome speech_turn(const std::string& user, const std::string& audio,
                          const std::optional<empathy::AudioFeatures>& features) {
    const auto p = require_user(*store_, user);
    return session_turn(user, speech_->transcribe(audio, p.language), features, nlu::Source::SpeechAdapter);
  }

  // The "continue" button after an activity video.
  TurnOutcome resume(const std::string& user) {
    const auto p = require_user(*store_, user);
    const auto open = sessions_.open_session(user);
    if (!open || open->phase != dialogue::Phase::ActivityRunning) {
      fail(ErrorKind::InvalidState, "no activity is running");
    }
    TurnOutcome out;
    out.frame = nlu::IntentFrame::synthetic("continue");
    out.result = sessions_.turn(user, "continue", out.frame, std::nullopt, p.program.length_days);
    return out;
  }

  // Per-day temperature and empathy aggregates for the progress bars.
  json progress(const std::string& user) const {
    const auto p = require_user(*store_, user);
    std::map<int, json> days;
    for (const auto& r : screening::history(*store_, user)) days[r.day]["health"] = r;
    for (const auto& s : sessions_.summaries(user)) {
      days[s.day]["scores"] = s.aggregates ? json(*s.aggregates) : json(nullptr);
    }
    json out{{"user", user}, {"program", {{"name", p.program.name}, {"length_days", p.program.length_days}}},
             {"days", json::array()}};
    for (auto& [day, entry] : days) {
      entry["day"] = day;
      if (!entry.contains("health")) entry["health"] = nullptr;
      if (!entry.contains("scores")) entry["scores"] = nullptr;
      out["days"].push_back(std::move(entry));
    }
    return out;
  }

 private:
  PlatformConfig config_;
  std::unique_ptr<store::DocumentStore> store_;
  std::shared_ptr<chat::PushChannel> push_;
  std::shared_ptr<chat::MeetingProvider> meetings_;
  std::shared_ptr<SpeechAdapter> speech_;
  std::map<Language, std::vector<nlu::IntentRule>> rules_;
  empathy::EmpathyService empathy_;
  dialogue::DialogueManager manager_;
  dialogue::SessionService sessions_;
  chat::ChatServer chat_;
  AuthService auth_;
};

}  // namespace nora::gateway
