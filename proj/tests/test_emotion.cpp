#include "doctest.h"
#include "mutec/emotion.hpp"
#include "mutec/errors.hpp"

using namespace mutec;

TEST_CASE("canonical emotion names round-trip") {
    for (int i = 0; i < kNumEmotions; ++i) {
        const auto e = static_cast<Emotion>(i);
        CHECK(parse_emotion(to_string(e)) == e);
    }
}

TEST_CASE("unknown label rejected") {
    CHECK_THROWS_AS(parse_emotion("boredom"), MappingError);
}

TEST_CASE("iemocap mapping clubs related labels") {
    CHECK(map_iemocap_emotion("excited") == Emotion::happiness);
    CHECK(map_iemocap_emotion("happy") == Emotion::happiness);
    CHECK(map_iemocap_emotion("frustrated") == Emotion::anger);
    CHECK(map_iemocap_emotion("anger") == Emotion::anger);
    CHECK(map_iemocap_emotion("sadness") == Emotion::sadness);
    CHECK(map_iemocap_emotion("neutral") == Emotion::neutral);
    CHECK_THROWS_AS(map_iemocap_emotion("boredom"), MappingError);
}

TEST_CASE("head class indices cover the six cause emotions") {
    for (int i = 0; i < kNumCauseEmotions; ++i)
        CHECK(emotion_class_index(emotion_from_class_index(i)) == i);
    CHECK_THROWS(emotion_class_index(Emotion::neutral));
}
