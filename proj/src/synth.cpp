#include "mutec/synth.hpp"

#include <array>
#include <cstdio>

#include "mutec/errors.hpp"
#include "mutec/rng.hpp"

namespace mutec {

std::vector<TargetShape> decompose_split(long targets, long positives, long negatives,
                                         long balanced_negatives) {
    const long T = targets, P = positives, N = negatives, B = balanced_negatives;
    if (T <= 0) throw ConfigError("split must contain at least one target");
    // a targets keep a single negative, b targets keep two (and absorb the
    // rest of N), c targets have none: B = a + 2b.
    const long a = B % 2;
    const long b = (B - a) / 2;
    const long c = T - a - b;
    if (c < 0)
        throw ConfigError("balanced negative count " + std::to_string(B) +
                          " needs more than " + std::to_string(T) + " targets");
    const long R = N - a;
    if (b == 0 && R != 0)
        throw ConfigError("negatives " + std::to_string(N) +
                          " cannot be absorbed without multi-negative targets");
    const long base = b > 0 ? R / b : 0;
    const long rem = b > 0 ? R % b : 0;
    if (b > 0 && base < 2)
        throw ConfigError("negatives " + std::to_string(N) +
                          " too few for balanced count " + std::to_string(B));
    const long excess = P - T;
    if (excess < 0 || excess > T)
        throw ConfigError("positives " + std::to_string(P) + " not within [T, 2T] for " +
                          std::to_string(T) + " targets");

    std::vector<TargetShape> shapes(static_cast<size_t>(T));
    for (long i = 0; i < T; ++i) {
        TargetShape& s = shapes[static_cast<size_t>(i)];
        s.positives = i < excess ? 2 : 1;
        if (i < a)
            s.negatives = 1;
        else if (i < a + b)
            s.negatives = static_cast<int>(base + ((i - a) < rem ? 1 : 0));
        else
            s.negatives = 0;
    }
    return shapes;
}

namespace {

constexpr std::array<const char*, 64> kVocab = {
    "anyway",  "because", "believe", "better",  "bought",  "breakfast", "bring",   "brother",
    "called",  "car",     "chance",  "coffee",  "coming",  "could",     "dinner",  "doctor",
    "dog",     "early",   "evening", "everyone","exam",    "feeling",   "finally", "found",
    "friend",  "game",    "garden",  "got",     "great",   "heard",     "helped",  "home",
    "house",   "idea",    "keys",    "kitchen", "late",    "letter",    "lost",    "lunch",
    "making",  "meeting", "money",   "morning", "movie",   "music",     "news",    "night",
    "office",  "party",   "phone",   "plan",    "rain",    "really",    "school",  "sister",
    "station", "still",   "story",   "street",  "ticket",  "today",     "train",   "weekend",
};

constexpr std::array<Emotion, 6> kCycle = {Emotion::happiness, Emotion::surprise,
                                           Emotion::anger,     Emotion::sadness,
                                           Emotion::disgust,   Emotion::fear};

struct SplitRow {
    long targets;
    long positives;
    long negatives;
    long balanced_negatives;
};

SplitRow dd_row(Split split) {
    switch (split) {
        case Split::train: return {4562, 7269, 20646, 7356};
        case Split::val: return {200, 347, 838, 308};
        case Split::test: return {1099, 1894, 5330, 1811};
    }
    return {0, 0, 0, 0};
}

std::string make_text(std::mt19937_64& eng) {
    std::uniform_int_distribution<int> nwords(4, 9);
    std::uniform_int_distribution<size_t> word(0, kVocab.size() - 1);
    std::uniform_int_distribution<int> punct(0, 3);
    const int n = nwords(eng);
    std::string text;
    for (int i = 0; i < n; ++i) {
        if (i > 0) text += ' ';
        text += kVocab[word(eng)];
    }
    const int p = punct(eng);
    text += p == 0 ? '!' : (p == 1 ? '?' : '.');
    return text;
}

// A word-aligned sub-range of the utterance text, at least one word long.
std::string make_span(const std::string& text, std::mt19937_64& eng) {
    std::vector<size_t> starts{0};
    for (size_t i = 0; i + 1 < text.size(); ++i)
        if (text[i] == ' ') starts.push_back(i + 1);
    std::uniform_int_distribution<size_t> first(0, starts.size() > 1 ? 1 : 0);
    const size_t s = first(eng);
    std::uniform_int_distribution<size_t> last(s, starts.size() - 1);
    const size_t e = last(eng);
    const size_t begin = starts[s];
    const size_t end = e + 1 < starts.size() ? starts[e + 1] - 1 : text.size();
    return text.substr(begin, end - begin);
}

std::string dialogue_id(Split split, long index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%05ld", to_string(split), index);
    return buf;
}

std::vector<Dialogue> make_dd_corpus(Split split, uint64_t seed) {
    const SplitRow row = dd_row(split);
    const auto shapes = decompose_split(row.targets, row.positives, row.negatives,
                                        row.balanced_negatives);
    std::vector<Dialogue> out;
    out.reserve(shapes.size());
    for (size_t di = 0; di < shapes.size(); ++di) {
        const TargetShape& shape = shapes[di];
        Dialogue d;
        d.id = dialogue_id(split, static_cast<long>(di));
        const int len = shape.negatives + shape.positives;
        const int target_idx = len - 1;
        for (int ui = 0; ui < len; ++ui) {
            auto eng = make_engine(mix_seed(seed, d.id, static_cast<uint64_t>(ui)));
            Utterance u;
            u.index = ui;
            u.speaker = ui % 2 == 0 ? "A" : "B";
            u.text = make_text(eng);
            u.emotion = ui == target_idx
                            ? kCycle[di % kCycle.size()]
                            : Emotion::neutral;
            d.utterances.push_back(std::move(u));
            if (ui >= shape.negatives) {
                auto span_eng =
                    make_engine(mix_seed(seed ^ 0x5eedULL, d.id, static_cast<uint64_t>(ui)));
                d.causes[target_idx].push_back(
                    CauseAnnotation{ui, make_span(d.utterances.back().text, span_eng)});
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

// Six fixed dialogues: four three-utterance ones (a non-cause opener, the
// cause, the emotive target: 1 positive + 1 fold-1 negative each) and two
// single-utterance self-cause ones (1 positive, no negatives), covering all
// six emotions. Fold 1 holds exactly 10 samples, 6 positive and 4 negative.
std::vector<Dialogue> make_overfit_corpus() {
    struct Row {
        const char* id;
        const char* opener;
        const char* cause;
        const char* span;
        const char* target;
        Emotion emotion;
    };
    const Row triples[] = {
        {"ov_00000", "how was your weekend", "we won the lottery this morning",
         "won the lottery", "this is the best day ever", Emotion::happiness},
        {"ov_00001", "any news from the street", "the quiet neighbour sold his house overnight",
         "sold his house", "nobody saw that coming at all", Emotion::surprise},
        {"ov_00002", "you look upset this evening", "someone scratched the new car again",
         "scratched the new car", "who keeps doing this to us", Emotion::anger},
        {"ov_00003", "it is very quiet in here", "the old dog passed away last night",
         "passed away", "the house feels empty now", Emotion::sadness},
    };
    const Row singles[] = {
        {"ov_00004", nullptr, nullptr, "milk in the fridge went bad",
         "the milk in the fridge went bad weeks ago", Emotion::disgust},
        {"ov_00005", nullptr, nullptr, "footsteps in the attic",
         "i keep hearing footsteps in the attic", Emotion::fear},
    };

    std::vector<Dialogue> out;
    for (const Row& r : triples) {
        Dialogue d;
        d.id = r.id;
        d.utterances.push_back(Utterance{0, "A", r.opener, Emotion::neutral});
        d.utterances.push_back(Utterance{1, "B", r.cause, Emotion::neutral});
        d.utterances.push_back(Utterance{2, "A", r.target, r.emotion});
        d.causes[2].push_back(CauseAnnotation{1, r.span});
        out.push_back(std::move(d));
    }
    for (const Row& r : singles) {
        Dialogue d;
        d.id = r.id;
        d.utterances.push_back(Utterance{0, "A", r.target, r.emotion});
        d.causes[0].push_back(CauseAnnotation{0, r.span});
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Dialogue> make_tiny_corpus(Split split, uint64_t seed) {
    std::vector<Dialogue> out;
    const uint64_t split_seed = mix_seed(seed, to_string(split));
    // 18 dialogues so every emotion is a target emotion three times; fold 3
    // can then draw two same-emotion foreign utterances for any target.
    for (long di = 0; di < 18; ++di) {
        Dialogue d;
        d.id = std::string("tiny_") + to_string(split) + "_" +
               (di < 10 ? "0" : "") + std::to_string(di);
        auto eng = make_engine(mix_seed(split_seed, d.id));
        std::uniform_int_distribution<int> nutt(3, 6);
        const int len = nutt(eng);
        const int target_idx = len - 1;
        for (int ui = 0; ui < len; ++ui) {
            auto text_eng = make_engine(mix_seed(split_seed, d.id, static_cast<uint64_t>(ui)));
            Utterance u;
            u.index = ui;
            u.speaker = ui % 2 == 0 ? "A" : "B";
            u.text = make_text(text_eng);
            u.emotion = ui == target_idx ? kCycle[static_cast<size_t>(di) % kCycle.size()]
                                         : Emotion::neutral;
            d.utterances.push_back(std::move(u));
        }
        // One or two causes: the utterance before the target, plus the target
        // itself on odd dialogues.
        auto span_eng = make_engine(mix_seed(split_seed ^ 0x5eedULL, d.id));
        d.causes[target_idx].push_back(CauseAnnotation{
            target_idx - 1, make_span(d.utterances[static_cast<size_t>(target_idx - 1)].text,
                                      span_eng)});
        if (di % 2 == 1)
            d.causes[target_idx].push_back(CauseAnnotation{
                target_idx,
                make_span(d.utterances[static_cast<size_t>(target_idx)].text, span_eng)});
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace

std::vector<Dialogue> make_synth_corpus(const std::string& profile, Split split, uint64_t seed) {
    if (profile == "reccon-dd") return make_dd_corpus(split, seed);
    if (profile == "overfit") return make_overfit_corpus();
    if (profile == "tiny") return make_tiny_corpus(split, seed);
    throw ConfigError("unknown synthetic corpus profile '" + profile + "'");
}

std::vector<std::string> synth_profiles() { return {"reccon-dd", "overfit", "tiny"}; }

}  // namespace mutec
