#include "mutec/emotion.hpp"

#include "mutec/errors.hpp"

namespace mutec {

namespace {
const std::array<std::string, kNumEmotions> kNames = {
    "happiness", "surprise", "anger", "sadness", "disgust", "fear", "neutral",
};
}  // namespace

const std::string& to_string(Emotion e) { return kNames[static_cast<int>(e)]; }

Emotion parse_emotion(const std::string& name) {
    for (int i = 0; i < kNumEmotions; ++i) {
        if (kNames[i] == name) return static_cast<Emotion>(i);
    }
    // DailyDialog files occasionally spell happiness as "happy".
    if (name == "happy") return Emotion::happiness;
    throw MappingError("unknown emotion label: '" + name + "'");
}

Emotion map_iemocap_emotion(const std::string& raw) {
    if (raw == "happy" || raw == "excited") return Emotion::happiness;
    if (raw == "anger" || raw == "frustrated") return Emotion::anger;
    if (raw == "sadness") return Emotion::sadness;
    if (raw == "neutral") return Emotion::neutral;
    throw MappingError("unknown IEMOCAP emotion label: '" + raw + "'");
}

int emotion_class_index(Emotion e) {
    int idx = static_cast<int>(e);
    if (idx >= kNumCauseEmotions)
        throw MappingError("emotion '" + to_string(e) + "' has no head class index");
    return idx;
}

Emotion emotion_from_class_index(int idx) {
    if (idx < 0 || idx >= kNumCauseEmotions)
        throw MappingError("emotion class index out of range: " + std::to_string(idx));
    return static_cast<Emotion>(idx);
}

}  // namespace mutec
