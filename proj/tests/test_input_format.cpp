#include <string>

#include "doctest.h"
#include "mutec/errors.hpp"
#include "mutec/input_format.hpp"

using namespace mutec;

namespace {

// The traffic-stop exchange: officer asks, explains, driver reacts.
Sample traffic_sample(bool with_context) {
    Sample s;
    s.dialogue_id = "tr_0";
    s.target = Utterance{2, "B", "I did?", Emotion::surprise};
    s.candidate = Utterance{1, "A", "you do realize that you ran a red light, don't you?",
                            Emotion::neutral};
    s.context =
        "What's wrong, officer? You do realize that you ran a red light, don't you? I did?";
    s.emotion = Emotion::surprise;
    s.gold_span = CharSpan{43, 62};  // "you ran a red light" inside utterance 1's region
    s.entail_label = 1;
    s.fold = 1;
    s.with_context = with_context;
    return s;
}

std::string slice(const std::string& text, std::pair<int, int> range) {
    return text.substr(static_cast<size_t>(range.first),
                       static_cast<size_t>(range.second - range.first));
}

std::string slice(const std::string& text, const CharSpan& span) {
    return text.substr(static_cast<size_t>(span.char_start),
                       static_cast<size_t>(span.char_end - span.char_start));
}

}  // namespace

TEST_CASE("task names round-trip and reject unknowns") {
    for (Task t : {Task::cse, Task::cee, Task::e2e}) CHECK(parse_task(to_string(t)) == t);
    CHECK_THROWS_AS(parse_task("span"), ConfigError);
}

TEST_CASE("span task with context matches the documented assembly") {
    Sample s = traffic_sample(true);
    CHECK(slice(s.context, *s.gold_span) == "you ran a red light");

    FormattedInput f = format_input(s, Task::cse);
    CHECK(f.input_text ==
          "I did?. you do realize that you ran a red light, don't you? <SEP> "
          "What's wrong, officer? You do realize that you ran a red light, don't you? I did?");
    CHECK(slice(f.input_text, f.target_range) == "I did?");
    CHECK(slice(f.input_text, f.candidate_range) ==
          "you do realize that you ran a red light, don't you?");
    CHECK(slice(f.input_text, f.context_range) == s.context);
    REQUIRE(f.gold_span.has_value());
    CHECK(slice(f.input_text, *f.gold_span) == "you ran a red light");
    // The gold lands inside the context segment, shifted by its offset.
    CHECK(f.gold_span->char_start == f.context_range.first + s.gold_span->char_start);
    CHECK(f.entail_label == 1);
}

TEST_CASE("negative sample keeps the shape but carries no span") {
    Sample s = traffic_sample(true);
    s.gold_span.reset();
    s.entail_label = 0;
    FormattedInput f = format_input(s, Task::cse);
    CHECK_FALSE(f.gold_span.has_value());
    CHECK(f.entail_label == 0);
    CHECK(slice(f.input_text, f.context_range) == s.context);
}

TEST_CASE("span task without context relocates the gold into the candidate segment") {
    Sample s = traffic_sample(false);
    FormattedInput f = format_input(s, Task::cse);
    CHECK(f.input_text == "I did?. you do realize that you ran a red light, don't you?");
    CHECK(f.context_range == std::pair<int, int>{0, 0});
    REQUIRE(f.gold_span.has_value());
    CHECK(slice(f.input_text, *f.gold_span) == "you ran a red light");
    CHECK(f.gold_span->char_start >= f.candidate_range.first);
    CHECK(f.gold_span->char_end <= f.candidate_range.second);
}

TEST_CASE("relocation picks the occurrence inside the candidate region") {
    Sample s;
    s.dialogue_id = "dup_0";
    s.target = Utterance{1, "B", "the dog barked all night", Emotion::anger};
    s.candidate = Utterance{0, "A", "the dog kept us awake", Emotion::neutral};
    s.context = "the dog kept us awake the dog barked all night";
    s.emotion = Emotion::anger;
    s.gold_span = CharSpan{0, 7};  // "the dog" in the candidate's region
    s.entail_label = 1;
    s.with_context = false;
    FormattedInput f = format_input(s, Task::cse);
    // "the dog" also opens U_t; the located span must sit in the U_i segment.
    CHECK(f.input_text == "the dog barked all night. the dog kept us awake");
    REQUIRE(f.gold_span.has_value());
    CHECK(f.gold_span->char_start == 26);
    CHECK(slice(f.input_text, *f.gold_span) == "the dog");
}

TEST_CASE("entailment input with context shares the span-task shape") {
    Sample s = traffic_sample(true);
    FormattedInput f = format_input(s, Task::cee);
    CHECK(f.input_text ==
          "I did?. you do realize that you ran a red light, don't you? <SEP> "
          "What's wrong, officer? You do realize that you ran a red light, don't you? I did?");
    CHECK_FALSE(f.gold_span.has_value());
    CHECK(f.entail_label == 1);
}

TEST_CASE("entailment input without context separates the pair with the marker") {
    Sample s = traffic_sample(false);
    FormattedInput f = format_input(s, Task::cee);
    CHECK(f.input_text ==
          "I did? <SEP> you do realize that you ran a red light, don't you?");
    CHECK(slice(f.input_text, f.target_range) == "I did?");
    CHECK(slice(f.input_text, f.candidate_range) ==
          "you do realize that you ran a red light, don't you?");
    CHECK_FALSE(f.gold_span.has_value());
}

TEST_CASE("joint task formats like the span task") {
    Sample s = traffic_sample(true);
    FormattedInput cse = format_input(s, Task::cse);
    FormattedInput e2e = format_input(s, Task::e2e);
    CHECK(cse.input_text == e2e.input_text);
    CHECK(e2e.gold_span.has_value());
    CHECK(e2e.entail_label == 1);
}

TEST_CASE("unlocatable span without context raises an alignment error") {
    Sample s = traffic_sample(false);
    s.candidate.text = "you do realize that, don't you?";
    CHECK_THROWS_AS(format_input(s, Task::cse), AlignmentError);
}
