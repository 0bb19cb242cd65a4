#pragma once

#include "nora/empathy/types.hpp"

namespace nora::empathy {

// Late fusion: out[c] = w.text * text[c] + w.audio * audio[c].
inline EmotionDistribution fuse_emotions(const EmotionDistribution& text,
                                         const EmotionDistribution& audio,
                                         const FusionWeights& w) {
  if (text.classes() != audio.classes()) {
    fail(ErrorKind::Unprocessable, "emotion distributions have different class sets");
  }
  std::vector<double> out(text.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = w.text() * text.scores()[i] + w.audio() * audio.scores()[i];
  }
  return EmotionDistribution(text.classes(), std::move(out));
}

}  // namespace nora::empathy
