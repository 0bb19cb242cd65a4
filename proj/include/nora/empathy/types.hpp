#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nora/error.hpp"

namespace nora::empathy {

using nlohmann::json;

enum class Polarity { Positive, Negative };

inline constexpr std::string_view to_string(Polarity p) noexcept {
  return p == Polarity::Positive ? "positive" : "negative";
}

struct SentimentScore {
  Polarity label = Polarity::Positive;
  double confidence = 0.5;  // mass of the winning side, in [0.5, 1]

  // Probability mass on the positive side.
  double positive_probability() const {
    return label == Polarity::Positive ? confidence : 1.0 - confidence;
  }
};

inline constexpr double kDistributionTolerance = 1e-9;

// Scores aligned with an ordered class list.
class EmotionDistribution {
 public:
  EmotionDistribution() = default;

  // Validates: same length, every score in [0,1], sum within 1e-9 of 1,
  // class names unique.
  EmotionDistribution(std::vector<std::string> classes, std::vector<double> scores)
      : classes_(std::move(classes)), scores_(std::move(scores)) {
    if (classes_.empty()) fail(ErrorKind::InvalidInput, "empty class set");
    if (classes_.size() != scores_.size()) fail(ErrorKind::InvalidInput, "class/score length mismatch");
    auto sorted = classes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail(ErrorKind::InvalidInput, "duplicate emotion class");
    }
    double sum = 0;
    for (double s : scores_) {
      if (!std::isfinite(s) || s < 0.0 || s > 1.0) fail(ErrorKind::InvalidInput, "emotion score out of range");
      sum += s;
    }
    if (std::abs(sum - 1.0) > kDistributionTolerance) {
      fail(ErrorKind::InvalidInput, "emotion scores do not sum to 1");
    }
  }

  static EmotionDistribution uniform(const std::vector<std::string>& classes) {
    if (classes.empty()) fail(ErrorKind::InvalidInput, "empty class set");
    return EmotionDistribution(classes,
                               std::vector<double>(classes.size(), 1.0 / static_cast<double>(classes.size())));
  }

  // Normalizes non-negative weights; all-zero weights give the uniform
  // distribution.
  static EmotionDistribution from_weights(const std::vector<std::string>& classes,
                                          std::vector<double> weights) {
    double total = 0;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0) fail(ErrorKind::InvalidInput, "invalid emotion weight");
      total += w;
    }
    if (total <= 0) return uniform(classes);
    for (double& w : weights) w /= total;
    clamp_sum(weights);
    return EmotionDistribution(classes, std::move(weights));
  }

  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<double>& scores() const { return scores_; }
  std::size_t size() const { return classes_.size(); }

  double at(std::string_view cls) const {
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      if (classes_[i] == cls) return scores_[i];
    }
    fail(ErrorKind::NotFound, "unknown emotion class: " + std::string(cls));
  }

  const std::string& argmax() const {
    const auto it = std::max_element(scores_.begin(), scores_.end());
    return classes_[static_cast<std::size_t>(it - scores_.begin())];
  }

  double sum() const {
    double s = 0;
    for (double v : scores_) s += v;
    return s;
  }

  friend bool operator==(const EmotionDistribution&, const EmotionDistribution&) = default;

 private:
  // Rounding can leave a normalized vector a few ulps off; fold the residue
  // into the largest entry.
  static void clamp_sum(std::vector<double>& w) {
    double s = 0;
    for (double v : w) s += v;
    auto it = std::max_element(w.begin(), w.end());
    *it = std::clamp(*it + (1.0 - s), 0.0, 1.0);
  }

  std::vector<std::string> classes_;
  std::vector<double> scores_;
};

struct StressScore {
  double value = 0.0;
};

class FusionWeights {
 public:
  FusionWeights() = default;
  FusionWeights(double text, double audio) : text_(text), audio_(audio) {
    if (!std::isfinite(text) || !std::isfinite(audio) || text < 0 || audio < 0 ||
        std::abs(text + audio - 1.0) > 1e-12) {
      fail(ErrorKind::InvalidInput, "fusion weights must be non-negative and sum to 1");
    }
  }

  static FusionWeights text_only() { return {1.0, 0.0}; }

  double text() const { return text_; }
  double audio() const { return audio_; }

 private:
  double text_ = 0.5;
  double audio_ = 0.5;
};

// Summary statistics of per-frame energy and pitch.
struct AudioFeatures {
  static constexpr std::size_t kSize = 4;
  enum Index : std::size_t { EnergyMean = 0, EnergyStd = 1, PitchMean = 2, PitchStd = 3 };

  std::array<double, kSize> stats{};
  double duration_seconds = 0.0;

  void validate() const {
    for (double v : stats) {
      if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "non-finite audio feature");
    }
    if (!std::isfinite(duration_seconds) || duration_seconds <= 0) {
      fail(ErrorKind::InvalidInput, "audio duration must be positive");
    }
  }
};

struct EmpathyScores {
  SentimentScore sentiment;
  EmotionDistribution emotion;
  StressScore stress;
};

inline void to_json(json& j, const SentimentScore& s) {
  j = json{{"label", to_string(s.label)}, {"confidence", s.confidence}};
}

inline void from_json(const json& j, SentimentScore& s) {
  const auto label = j.at("label").get<std::string>();
  if (label != "positive" && label != "negative") fail(ErrorKind::InvalidInput, "bad sentiment label");
  s.label = label == "positive" ? Polarity::Positive : Polarity::Negative;
  s.confidence = j.at("confidence").get<double>();
}

inline void to_json(json& j, const EmotionDistribution& d) {
  j = json::object();
  j["classes"] = d.classes();
  json scores = json::object();
  for (std::size_t i = 0; i < d.size(); ++i) scores[d.classes()[i]] = d.scores()[i];
  j["scores"] = std::move(scores);
}

inline void from_json(const json& j, EmotionDistribution& d) {
  auto classes = j.at("classes").get<std::vector<std::string>>();
  std::vector<double> scores;
  for (const auto& c : classes) scores.push_back(j.at("scores").at(c).get<double>());
  d = EmotionDistribution(std::move(classes), std::move(scores));
}

inline void to_json(json& j, const EmpathyScores& s) {
  j = json{{"sentiment", s.sentiment}, {"emotion", s.emotion}, {"stress", s.stress.value}};
}

inline void from_json(const json& j, EmpathyScores& s) {
  s.sentiment = j.at("sentiment").get<SentimentScore>();
  s.emotion = j.at("emotion").get<EmotionDistribution>();
  s.stress.value = j.at("stress").get<double>();
}

inline void from_json(const json& j, AudioFeatures& f) {
  f.stats[AudioFeatures::EnergyMean] = j.value("energy_mean", 0.0);
  f.stats[AudioFeatures::EnergyStd] = j.value("energy_std", 0.0);
  f.stats[AudioFeatures::PitchMean] = j.value("pitch_mean", 0.0);
  f.stats[AudioFeatures::PitchStd] = j.value("pitch_std", 0.0);
  f.duration_seconds = j.value("duration", 0.0);
}

}  // namespace nora::empathy
