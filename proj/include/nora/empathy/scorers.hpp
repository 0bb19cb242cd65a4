#pragma once

#include <memory>

#include "nora/empathy/lexicon.hpp"
#include "nora/empathy/types.hpp"

namespace nora::empathy {

class SentimentScorer {
 public:
  virtual ~SentimentScorer() = default;
  virtual SentimentScore score(std::string_view text) const = 0;
};

class TextEmotionScorer {
 public:
  virtual ~TextEmotionScorer() = default;
  virtual const std::vector<std::string>& classes() const = 0;
  virtual EmotionDistribution score(std::string_view text) const = 0;
};

class AudioEmotionScorer {
 public:
  virtual ~AudioEmotionScorer() = default;
  virtual const std::vector<std::string>& classes() const = 0;
  virtual EmotionDistribution score(const AudioFeatures& features) const = 0;
};

class StressScorer {
 public:
  virtual ~StressScorer() = default;
  virtual StressScore score(std::string_view text) const = 0;
};

// Counts positive and negative lexicon hits; ties (including no hits) go to
// positive with the winning side's share as confidence.
class LexiconSentimentScorer final : public SentimentScorer {
 public:
  explicit LexiconSentimentScorer(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

  SentimentScore score(std::string_view text) const override {
    if (text::is_blank(text)) fail(ErrorKind::InvalidInput, "empty text");
    std::size_t pos = 0, neg = 0;
    for (const auto& tok : lexicon_.segment(text)) {
      for (const auto& cls : lexicon_.classes_of(tok)) {
        if (cls == "positive") ++pos;
        else if (cls == "negative") ++neg;
      }
    }
    if (pos + neg == 0) return {Polarity::Positive, 0.5};
    const auto total = static_cast<double>(pos + neg);
    if (pos >= neg) return {Polarity::Positive, static_cast<double>(pos) / total};
    return {Polarity::Negative, static_cast<double>(neg) / total};
  }

 private:
  Lexicon lexicon_;
};

// Keyword counts per class with add-one smoothing.
class LexiconEmotionScorer final : public TextEmotionScorer {
 public:
  LexiconEmotionScorer(Lexicon lexicon, std::vector<std::string> classes)
      : lexicon_(std::move(lexicon)), classes_(std::move(classes)) {
    EmotionDistribution::uniform(classes_);  // validates the class set
  }

  const std::vector<std::string>& classes() const override { return classes_; }

  EmotionDistribution score(std::string_view text) const override {
    std::vector<double> weights(classes_.size(), 1.0);
    for (const auto& tok : lexicon_.segment(text)) {
      for (const auto& cls : lexicon_.classes_of(tok)) {
        for (std::size_t i = 0; i < classes_.size(); ++i) {
          if (classes_[i] == cls) weights[i] += 1.0;
        }
      }
    }
    return EmotionDistribution::from_weights(classes_, std::move(weights));
  }

 private:
  Lexicon lexicon_;
  std::vector<std::string> classes_;
};

// Share of tokens that are stress keywords.
class LexiconStressScorer final : public StressScorer {
 public:
  explicit LexiconStressScorer(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

  StressScore score(std::string_view text) const override {
    const auto toks = lexicon_.segment(text);
    if (toks.empty()) return {0.0};
    std::size_t hits = 0;
    for (const auto& tok : toks) {
      if (lexicon_.contains(tok)) ++hits;
    }
    return {std::clamp(static_cast<double>(hits) / static_cast<double>(toks.size()), 0.0, 1.0)};
  }

 private:
  Lexicon lexicon_;
};

// Places the utterance in an (arousal, variability) plane from energy and
// pitch spread and scores classes by closeness to fixed prototypes. Silent
// input carries no evidence and yields the uniform distribution.
class ProsodyEmotionScorer final : public AudioEmotionScorer {
 public:
  explicit ProsodyEmotionScorer(std::vector<std::string> classes) : classes_(std::move(classes)) {
    EmotionDistribution::uniform(classes_);
  }

  const std::vector<std::string>& classes() const override { return classes_; }

  EmotionDistribution score(const AudioFeatures& f) const override {
    f.validate();
    const double energy = f.stats[AudioFeatures::EnergyMean];
    const double energy_spread = f.stats[AudioFeatures::EnergyStd];
    if (energy <= 0.0 && energy_spread <= 0.0) return EmotionDistribution::uniform(classes_);
    const double arousal = std::tanh(std::max(energy, 0.0));
    const double variability = std::tanh(std::abs(f.stats[AudioFeatures::PitchStd]) / 50.0);
    std::vector<double> weights;
    weights.reserve(classes_.size());
    for (const auto& cls : classes_) {
      const auto [pa, pv] = prototype(cls);
      const double d2 = (arousal - pa) * (arousal - pa) + (variability - pv) * (variability - pv);
      weights.push_back(std::exp(-d2 / 0.1));
    }
    return EmotionDistribution::from_weights(classes_, std::move(weights));
  }

  static std::pair<double, double> prototype(std::string_view cls) {
    if (cls == "happy" || cls == "joy") return {0.7, 0.7};
    if (cls == "angry" || cls == "anger") return {0.9, 0.4};
    if (cls == "sad" || cls == "sadness") return {0.2, 0.2};
    if (cls == "neutral") return {0.4, 0.3};
    if (cls == "fear") return {0.8, 0.8};
    if (cls == "surprise") return {0.8, 0.9};
    return {0.5, 0.5};
  }

 private:
  std::vector<std::string> classes_;
};

}  // namespace nora::empathy
