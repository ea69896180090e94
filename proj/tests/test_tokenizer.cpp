#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "mutec/errors.hpp"
#include "mutec/input_format.hpp"
#include "mutec/tokenizer.hpp"

using namespace mutec;

namespace {

// Exhaustive covering-interval search over non-special tokens: smallest
// token count, innermost start on ties.
std::pair<int, int> oracle_span(const TokenizedInput& tok, const CharSpan& span) {
    int best_i = -1, best_j = -1;
    for (int i = 0; i < tok.size(); ++i) {
        const auto& [bi, ei] = tok.char_offsets[static_cast<size_t>(i)];
        if (bi < 0 || bi > span.char_start) continue;
        for (int j = i; j < tok.size(); ++j) {
            const auto& [bj, ej] = tok.char_offsets[static_cast<size_t>(j)];
            if (bj < 0 || ej < span.char_end) continue;
            const bool better = best_i < 0 || (j - i) < (best_j - best_i) ||
                                ((j - i) == (best_j - best_i) && i > best_i);
            if (better) {
                best_i = i;
                best_j = j;
            }
            break;  // larger j only widens the interval for this i
        }
    }
    return {best_i, best_j};
}

std::string random_text(std::mt19937_64& eng) {
    static const std::vector<std::string> words = {"alpha", "beta",  "Gamma", "delta",
                                                   "light", "red",   "ran",   "you",
                                                   "a",     "officer", "wrong", "What's"};
    std::uniform_int_distribution<int> nwords(1, 12);
    std::uniform_int_distribution<size_t> yield(0, words.size() - 1);
    std::uniform_int_distribution<int> glue(0, 5);
    const int n = nwords(eng);
    std::string text;
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            switch (glue(eng)) {
                case 0: text += ", "; break;
                case 1: text += "  "; break;
                case 2: text += " <SEP> "; break;
                default: text += ' ';
            }
        }
        text += words[yield(eng)];
    }
    if (glue(eng) == 0) text += '!';
    return text;
}

}  // namespace

TEST_CASE("documented offsets for a plain sentence") {
    auto tok = tokenize("you ran a red light", 512);
    REQUIRE(tok.size() == 6);  // BOS + 5 words
    CHECK(tok.token_ids[0] == kBosTokenId);
    CHECK(tok.char_offsets[0] == std::pair<int, int>{-1, -1});
    const std::pair<int, int> expected[] = {{0, 3}, {4, 7}, {8, 9}, {10, 13}, {14, 19}};
    for (int t = 1; t < tok.size(); ++t)
        CHECK(tok.char_offsets[static_cast<size_t>(t)] == expected[t - 1]);
    CHECK_FALSE(tok.truncated);
    for (int m : tok.attention_mask) CHECK(m == 1);
}

TEST_CASE("separator is one token, punctuation splits off") {
    auto tok = tokenize("I did? <SEP> don't", 512);
    std::vector<std::string> surfaces;
    for (int t = 1; t < tok.size(); ++t) {
        const auto& [b, e] = tok.char_offsets[static_cast<size_t>(t)];
        surfaces.push_back(tok.text.substr(static_cast<size_t>(b), static_cast<size_t>(e - b)));
    }
    CHECK(surfaces == std::vector<std::string>{"I", "did", "?", "<SEP>", "don", "'", "t"});
    CHECK(tok.token_ids[4] == kSepTokenId);
}

TEST_CASE("word ids ignore case and repeat for repeated words") {
    auto tok = tokenize("Light light LIGHT dark", 512);
    CHECK(tok.token_ids[1] == tok.token_ids[2]);
    CHECK(tok.token_ids[2] == tok.token_ids[3]);
    CHECK(tok.token_ids[3] != tok.token_ids[4]);
    for (int t = 1; t < tok.size(); ++t) CHECK(tok.token_ids[static_cast<size_t>(t)] >= 256);
}

TEST_CASE("round-trip property on randomized texts") {
    std::mt19937_64 eng(2024);
    for (int it = 0; it < 200; ++it) {
        const std::string text = random_text(eng);
        auto tok = tokenize(text, 512);
        for (int t = 1; t < tok.size(); ++t) {
            const auto& [b, e] = tok.char_offsets[static_cast<size_t>(t)];
            REQUIRE(b >= 0);
            REQUIRE(e <= static_cast<int>(text.size()));
            const std::string surface =
                text.substr(static_cast<size_t>(b), static_cast<size_t>(e - b));
            if (tok.token_ids[static_cast<size_t>(t)] == kSepTokenId)
                CHECK(surface == "<SEP>");
            else
                CHECK_FALSE(surface.empty());
            // Offsets strictly ascend and never overlap.
            if (t > 1) CHECK(b >= tok.char_offsets[static_cast<size_t>(t - 1)].second);
        }
    }
}

TEST_CASE("truncation keeps the leading tokens and flags itself") {
    auto full = tokenize("one two three four five six", 512);
    auto cut = tokenize("one two three four five six", 4);
    CHECK(cut.truncated);
    CHECK(cut.size() == 4);
    for (int t = 0; t < cut.size(); ++t) {
        CHECK(cut.token_ids[static_cast<size_t>(t)] == full.token_ids[static_cast<size_t>(t)]);
        CHECK(cut.char_offsets[static_cast<size_t>(t)] ==
              full.char_offsets[static_cast<size_t>(t)]);
    }
}

TEST_CASE("a heavily truncated contextual input still starts with target tokens") {
    Sample s;
    s.dialogue_id = "t_0";
    s.target = Utterance{1, "B", "short answer", Emotion::anger};
    s.candidate = Utterance{0, "A", "much longer leading remark", Emotion::neutral};
    s.context = "much longer leading remark short answer";
    s.emotion = Emotion::anger;
    s.entail_label = 0;
    s.with_context = true;
    auto f = format_input(s, Task::cse);
    auto tok = tokenize(f, 3);
    CHECK(tok.truncated);
    REQUIRE(tok.size() == 3);
    const auto& [b, e] = tok.char_offsets[1];
    CHECK(tok.text.substr(static_cast<size_t>(b), static_cast<size_t>(e - b)) == "short");
    CHECK(tok.target_range == f.target_range);
    CHECK(tok.candidate_range == f.candidate_range);
}

TEST_CASE("empty char span maps to the empty token span") {
    auto tok = tokenize("you ran a red light", 512);
    CHECK(char_span_to_token_span(tok, CharSpan{0, 0}) == std::pair<int, int>{0, 0});
    CHECK(char_span_to_token_span(tok, CharSpan{7, 7}) == std::pair<int, int>{0, 0});
    CHECK(token_span_to_char_span(tok, 0, 0) == CharSpan{0, 0});
    CHECK(span_text(tok, 0, 0).empty());
}

TEST_CASE("exact word spans map to their tokens") {
    auto tok = tokenize("you ran a red light", 512);
    CHECK(char_span_to_token_span(tok, CharSpan{4, 7}) == std::pair<int, int>{2, 2});
    CHECK(char_span_to_token_span(tok, CharSpan{4, 19}) == std::pair<int, int>{2, 5});
    CHECK(span_text(tok, 2, 5) == "ran a red light");
    CHECK(token_span_to_char_span(tok, 2, 5) == CharSpan{4, 19});
}

TEST_CASE("span mapping agrees with the exhaustive covering search") {
    std::mt19937_64 eng(7);
    int compared = 0;
    for (int it = 0; it < 300; ++it) {
        const std::string text = random_text(eng);
        auto tok = tokenize(text, 512);
        if (tok.size() < 2) continue;
        std::uniform_int_distribution<int> pos(0, static_cast<int>(text.size()));
        for (int trial = 0; trial < 8; ++trial) {
            int a = pos(eng), b = pos(eng);
            if (a > b) std::swap(a, b);
            if (a == b) continue;
            const CharSpan span{a, b};
            auto expected = oracle_span(tok, span);
            if (expected.first < 0) {
                CHECK_THROWS_AS(char_span_to_token_span(tok, span), AlignmentError);
            } else {
                CHECK(char_span_to_token_span(tok, span) == expected);
                ++compared;
            }
        }
    }
    CHECK(compared > 500);
}

TEST_CASE("spans past the truncation point are reported lost") {
    auto tok = tokenize("one two three four five six", 4);
    REQUIRE(tok.truncated);
    // "five" lives at chars 19..23, beyond the 3 kept words.
    CHECK_THROWS_AS(char_span_to_token_span(tok, CharSpan{19, 23}), SpanLostError);
    // A span inside the kept region still maps.
    CHECK(char_span_to_token_span(tok, CharSpan{4, 7}) == std::pair<int, int>{2, 2});
}

TEST_CASE("out-of-bounds char spans are rejected") {
    auto tok = tokenize("you ran", 512);
    CHECK_THROWS_AS(char_span_to_token_span(tok, CharSpan{0, 99}), AlignmentError);
    CHECK_THROWS_AS(char_span_to_token_span(tok, CharSpan{-1, 3}), AlignmentError);
    CHECK_THROWS_AS(tokenize("x", 0), ConfigError);
}
