#pragma once

#include <array>
#include <string>

namespace mutec {

// Canonical emotion inventory. The first six are the DailyDialog cause
// emotions and double as class indices for the emotion heads; neutral
// utterances never carry cause annotations.
enum class Emotion {
    happiness,
    surprise,
    anger,
    sadness,
    disgust,
    fear,
    neutral,
};

inline constexpr int kNumEmotions = 7;
inline constexpr int kNumCauseEmotions = 6;

const std::string& to_string(Emotion e);

// Parses a canonical label (the DailyDialog inventory). Throws MappingError
// on anything else.
Emotion parse_emotion(const std::string& name);

// IEMOCAP label mapping: happy/excited -> happiness, frustrated -> anger,
// the rest pass through canonically. Throws MappingError on unknown labels.
Emotion map_iemocap_emotion(const std::string& raw);

// Class index for the emotion heads (0..5 over the non-neutral inventory).
// Neutral has no class; callers must not feed neutral targets to a head.
int emotion_class_index(Emotion e);
Emotion emotion_from_class_index(int idx);

}  // namespace mutec
