#include <numeric>
#include <set>

#include "doctest.h"
#include "mutec/errors.hpp"
#include "mutec/fold.hpp"
#include "mutec/synth.hpp"

using namespace mutec;

namespace {

struct Totals {
    long positives = 0;
    long negatives = 0;
    long balanced = 0;
};

Totals sum_shapes(const std::vector<TargetShape>& shapes) {
    Totals t;
    for (const auto& s : shapes) {
        t.positives += s.positives;
        t.negatives += s.negatives;
        t.balanced += std::min(2, s.negatives);
    }
    return t;
}

}  // namespace

TEST_CASE("decompose reproduces every published row") {
    struct Row {
        long targets, positives, negatives, balanced;
    };
    const Row rows[] = {
        {4562, 7269, 20646, 7356},  // train
        {200, 347, 838, 308},       // val
        {1099, 1894, 5330, 1811},   // test
    };
    for (const Row& r : rows) {
        auto shapes = decompose_split(r.targets, r.positives, r.negatives, r.balanced);
        REQUIRE(static_cast<long>(shapes.size()) == r.targets);
        Totals t = sum_shapes(shapes);
        CHECK(t.positives == r.positives);
        CHECK(t.negatives == r.negatives);
        CHECK(t.balanced == r.balanced);
        for (const auto& s : shapes) {
            CHECK(s.positives >= 1);
            CHECK(s.positives <= 2);
            CHECK(s.negatives >= 0);
        }
    }
}

TEST_CASE("decompose rejects unrepresentable rows") {
    CHECK_THROWS_AS(decompose_split(0, 0, 0, 0), ConfigError);
    CHECK_THROWS_AS(decompose_split(10, 9, 5, 4), ConfigError);   // fewer positives than targets
    CHECK_THROWS_AS(decompose_split(10, 10, 5, 30), ConfigError); // balanced needs >10 targets
    CHECK_THROWS_AS(decompose_split(10, 10, 5, 0), ConfigError);  // negatives with no carriers
}

TEST_CASE("generated corpus realizes the published fold statistics") {
    for (Split split : {Split::train, Split::val, Split::test}) {
        auto ds = make_synth_corpus("reccon-dd", split, 0);
        FoldSpec full;
        full.split = split;
        auto counts = count_fold(build_fold(ds, full));
        FoldSpec balanced = full;
        balanced.balanced = true;
        auto bcounts = count_fold(build_fold(ds, balanced));
        switch (split) {
            case Split::train:
                CHECK(counts.positives == 7269);
                CHECK(counts.negatives == 20646);
                CHECK(bcounts.positives == 7269);
                CHECK(bcounts.negatives == 7356);
                break;
            case Split::val:
                CHECK(counts.positives == 347);
                CHECK(counts.negatives == 838);
                CHECK(bcounts.positives == 347);
                CHECK(bcounts.negatives == 308);
                break;
            case Split::test:
                CHECK(counts.positives == 1894);
                CHECK(counts.negatives == 5330);
                CHECK(bcounts.positives == 1894);
                CHECK(bcounts.negatives == 1811);
                break;
        }
    }
}

TEST_CASE("corpus generation is deterministic in the seed") {
    auto a = make_synth_corpus("reccon-dd", Split::val, 3);
    auto b = make_synth_corpus("reccon-dd", Split::val, 3);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        REQUIRE(a[i].utterances.size() == b[i].utterances.size());
        for (size_t u = 0; u < a[i].utterances.size(); ++u)
            CHECK(a[i].utterances[u].text == b[i].utterances[u].text);
    }
    auto c = make_synth_corpus("reccon-dd", Split::val, 4);
    bool any_diff = false;
    for (size_t i = 0; i < a.size() && !any_diff; ++i)
        for (size_t u = 0; u < a[i].utterances.size(); ++u)
            if (a[i].utterances[u].text != c[i].utterances[u].text) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("every generated dialogue validates") {
    for (const char* profile : {"reccon-dd", "overfit", "tiny"}) {
        auto ds = make_synth_corpus(profile, Split::val, 1);
        for (const auto& d : ds) CHECK_NOTHROW(d.validate());
    }
}

TEST_CASE("overfit corpus shape") {
    auto ds = make_synth_corpus("overfit", Split::train, 0);
    CHECK(ds.size() == 6);
    FoldSpec spec;
    auto samples = build_fold(ds, spec);
    auto counts = count_fold(samples);
    CHECK(counts.positives == 6);
    CHECK(counts.negatives == 4);
    CHECK(samples.size() == 10);
    std::set<Emotion> emotions;
    for (const auto& s : samples) emotions.insert(s.emotion);
    CHECK(emotions.size() == 6);  // every non-neutral emotion appears
    // Every emotion has at least one positive, so class weights exist.
    std::map<Emotion, int> pos_per_emotion;
    for (const auto& s : samples)
        if (s.entail_label == 1) pos_per_emotion[s.emotion]++;
    CHECK(pos_per_emotion.size() == 6);
}

TEST_CASE("tiny corpus supports balanced fold 3") {
    auto ds = make_synth_corpus("tiny", Split::train, 7);
    CHECK(ds.size() == 18);
    FoldSpec spec;
    spec.fold_id = 3;
    spec.balanced = true;
    spec.seed = 7;
    auto samples = build_fold(ds, spec);
    auto counts = count_fold(samples);
    CHECK(counts.negatives == 2 * 18);
    for (const auto& s : samples)
        if (s.entail_label == 0) CHECK(s.candidate.emotion == s.emotion);
}

TEST_CASE("unknown profile is rejected") {
    CHECK_THROWS_AS(make_synth_corpus("giant", Split::train, 0), ConfigError);
    auto names = synth_profiles();
    CHECK(names.size() == 3);
}
