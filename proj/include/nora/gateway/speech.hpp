#pragma once

#include <string>

#include "nora/nlu/types.hpp"

namespace nora::gateway {

// Speech recognition and synthesis hooks.
class SpeechAdapter {
 public:
  virtual ~SpeechAdapter() = default;
  virtual std::string transcribe(const std::string& audio, Language lang) = 0;
  virtual std::string synthesize(const std::string& text, Language lang) = 0;
};

// Treats the audio blob as UTF-8 text in both directions.
class PassthroughSpeech : public SpeechAdapter {
 public:
  std::string transcribe(const std::string& audio, Language) override { return audio; }
  std::string synthesize(const std::string& text, Language) override { return text; }
};

}  // namespace nora::gateway
