#pragma once

#include <filesystem>
#include <map>

#include "nora/empathy/fusion.hpp"
#include "nora/empathy/scorers.hpp"
#include "nora/nlu/types.hpp"

namespace nora::empathy {

struct EmpathyConfig {
  std::vector<std::string> class_set{"happy", "sad", "angry", "neutral"};
  FusionWeights weights{0.5, 0.5};
};

// The scorers used for one language.
struct ScorerSet {
  std::shared_ptr<const SentimentScorer> sentiment;
  std::shared_ptr<const TextEmotionScorer> text_emotion;
  std::shared_ptr<const AudioEmotionScorer> audio_emotion;
  std::shared_ptr<const StressScorer> stress;
};

// Lexicon baselines from `<dir>/{sentiment,emotion,stress}.<lang>`.
inline ScorerSet load_lexicon_scorers(const std::filesystem::path& dir, Language lang,
                                      const EmpathyConfig& config) {
  const std::string ext(to_string(lang));
  ScorerSet set;
  set.sentiment = std::make_shared<LexiconSentimentScorer>(Lexicon::load(dir / ("sentiment." + ext)));
  set.text_emotion =
      std::make_shared<LexiconEmotionScorer>(Lexicon::load(dir / ("emotion." + ext)), config.class_set);
  set.audio_emotion = std::make_shared<ProsodyEmotionScorer>(config.class_set);
  set.stress = std::make_shared<LexiconStressScorer>(Lexicon::load(dir / ("stress." + ext)));
  return set;
}

class EmpathyService {
 public:
  EmpathyService(EmpathyConfig config, std::map<Language, ScorerSet> scorers)
      : config_(std::move(config)), scorers_(std::move(scorers)) {
    for (const auto& [lang, set] : scorers_) {
      if (!set.sentiment || !set.text_emotion || !set.audio_emotion || !set.stress) {
        fail(ErrorKind::InvalidInput, "incomplete scorer set");
      }
    }
  }

  static EmpathyService from_lexicons(const std::filesystem::path& dir, EmpathyConfig config) {
    std::map<Language, ScorerSet> scorers;
    for (auto lang : {Language::EN, Language::ZH}) scorers[lang] = load_lexicon_scorers(dir, lang, config);
    return EmpathyService(std::move(config), std::move(scorers));
  }

  const EmpathyConfig& config() const { return config_; }
  const ScorerSet& scorers(Language lang) const {
    auto it = scorers_.find(lang);
    if (it == scorers_.end()) fail(ErrorKind::InvalidInput, "no scorers for language");
    return it->second;
  }

  // Sentiment, fused emotion and stress for one turn. Without audio the
  // text distribution passes through unchanged.
  EmpathyScores score_turn(const nlu::Utterance& u,
                           const std::optional<AudioFeatures>& audio = std::nullopt) const {
    const auto& s = scorers(u.language);
    EmpathyScores out;
    out.sentiment = s.sentiment->score(u.text);
    const auto text_emotion = s.text_emotion->score(u.text);
    if (audio) {
      out.emotion = fuse_emotions(text_emotion, s.audio_emotion->score(*audio), config_.weights);
    } else {
      out.emotion = fuse_emotions(text_emotion, text_emotion, FusionWeights::text_only());
    }
    out.stress = s.stress->score(u.text);
    return out;
  }

 private:
  EmpathyConfig config_;
  std::map<Language, ScorerSet> scorers_;
};

}  // namespace nora::empathy
