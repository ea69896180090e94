#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mutec/dialogue.hpp"
#include "mutec/errors.hpp"

using namespace mutec;

namespace {

// The traffic-stop exchange: the officer's explanation causes the driver's
// surprised "I did?".
const char* kTrafficJson =
    R"({"id":"tr_0","utterances":[{"speaker":"A","text":"What's wrong, officer?","emotion":"neutral"},{"speaker":"B","text":"You do realize that you ran a red light, don't you?","emotion":"neutral"},{"speaker":"A","text":"I did?","emotion":"surprise"}],"causes":[{"target_idx":2,"cause_idx":1,"span":"you ran a red light"}]})";

}  // namespace

TEST_CASE("single dialogue parses with cause annotation") {
    auto dialogues = parse_corpus_text(kTrafficJson, CorpusKind::DD, "inline");
    REQUIRE(dialogues.size() == 1);
    const Dialogue& d = dialogues[0];
    CHECK(d.id == "tr_0");
    REQUIRE(d.utterances.size() == 3);
    CHECK(d.utterances[2].emotion == Emotion::surprise);
    REQUIRE(d.causes.count(2) == 1);
    CHECK(d.causes.at(2).at(0).cause_index == 1);
    CHECK(d.causes.at(2).at(0).span == "you ran a red light");
}

TEST_CASE("empty corpus text gives empty list") {
    CHECK(parse_corpus_text("", CorpusKind::DD, "inline").empty());
}

TEST_CASE("span absent from cause utterance is an annotation error") {
    std::string bad = kTrafficJson;
    const auto pos = bad.find("\"span\":\"you ran a red light\"");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 28, "\"span\":\"xyz am no substring\"");
    CHECK_THROWS_AS(parse_corpus_text(bad, CorpusKind::DD, "inline"), AnnotationError);
}

TEST_CASE("iemocap corpus maps raw labels at load") {
    const char* text =
        R"({"id":"ie_0","utterances":[{"speaker":"A","text":"we got the grant","emotion":"excited"},{"speaker":"B","text":"they cut the budget again","emotion":"frustrated"}],"causes":[{"target_idx":1,"cause_idx":1,"span":"cut the budget"}]})";
    auto dialogues = parse_corpus_text(text, CorpusKind::IEMO, "inline");
    REQUIRE(dialogues.size() == 1);
    CHECK(dialogues[0].utterances[0].emotion == Emotion::happiness);
    CHECK(dialogues[0].utterances[1].emotion == Emotion::anger);
}

TEST_CASE("corpus file round-trip") {
    const auto dir = std::filesystem::temp_directory_path() / "mutec_test_corpus";
    std::filesystem::create_directories(dir);
    const auto path = dir / "roundtrip.jsonl";
    auto dialogues = parse_corpus_text(kTrafficJson, CorpusKind::DD, "inline");
    write_corpus(path, dialogues);
    auto loaded = load_corpus(path, CorpusKind::DD);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].id == dialogues[0].id);
    CHECK(loaded[0].utterances.size() == dialogues[0].utterances.size());
    CHECK(loaded[0].causes.at(2).at(0).span == dialogues[0].causes.at(2).at(0).span);
    std::filesystem::remove_all(dir);
}

TEST_CASE("whole-file json array accepted") {
    std::string arr = std::string("[") + kTrafficJson + "]";
    CHECK(parse_corpus_text(arr, CorpusKind::DD, "inline").size() == 1);
}

TEST_CASE("bad cause index names the dialogue") {
    const char* text =
        R"({"id":"bad_7","utterances":[{"speaker":"A","text":"hi there","emotion":"neutral"}],"causes":[{"target_idx":0,"cause_idx":5,"span":"hi"}]})";
    try {
        parse_corpus_text(text, CorpusKind::DD, "inline");
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("bad_7") != std::string::npos);
    }
}
