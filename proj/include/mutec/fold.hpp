#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mutec/dialogue.hpp"

namespace mutec {

enum class Split { train, val, test };

Split parse_split(const std::string& name);
const char* to_string(Split s);

// Character span into a Sample's context string, half-open [char_start, char_end).
struct CharSpan {
    int char_start = 0;
    int char_end = 0;

    bool operator==(const CharSpan&) const = default;
};

struct FoldSpec {
    int fold_id = 1;  // 1: same-dialogue non-causes, 2: random foreign, 3: foreign same-emotion
    bool balanced = false;
    Split split = Split::train;
    uint64_t seed = 0;
    bool with_context = true;
    // Fold2/3 only: total negatives to draw for the split. Defaults to the
    // released per-split totals (see default_negative_total).
    std::optional<long> negative_total;
};

// One (target utterance, candidate cause utterance) instance. gold_span indexes
// into `context`; it is present exactly when entail_label == 1.
struct Sample {
    std::string dialogue_id;
    Utterance target;
    Utterance candidate;
    std::string context;
    Emotion emotion = Emotion::neutral;
    std::optional<CharSpan> gold_span;
    int entail_label = 0;
    int fold = 1;
    bool with_context = true;
};

// Negative totals of the released Fold2/Fold3 variants, per split.
long default_negative_total(int fold_id, Split split);

// Dialogue history joined by single spaces, utterances [0, upto] inclusive.
std::string context_up_to(const Dialogue& d, int upto);

// Character range of utterance `idx` inside context_up_to(d, upto).
// Half-open; requires idx <= upto.
std::pair<int, int> utterance_range_in_context(const Dialogue& d, int upto, int idx);

// First occurrence of span_text that lies fully inside [range_begin, range_end)
// of context. Throws AlignmentError when absent.
CharSpan locate_span(const std::string& context, int range_begin, int range_end,
                     const std::string& span_text, const std::string& origin);

// Builds all samples for one fold variant. Positives are every annotated
// (target, cause) pair and are identical across folds; negatives follow the
// fold strategy. Output order is canonical: (dialogue id, target index,
// candidate index, span start, candidate text, context).
std::vector<Sample> build_fold(const std::vector<Dialogue>& dialogues, const FoldSpec& spec);

struct FoldCounts {
    long positives = 0;
    long negatives = 0;
};

FoldCounts count_fold(const std::vector<Sample>& samples);

// Stable content-derived id, hex encoded; prediction records refer to samples
// by this key.
std::string sample_id(const Sample& s);

void write_fold(const std::filesystem::path& path, const std::vector<Sample>& samples);
std::vector<Sample> read_fold(const std::filesystem::path& path);

std::string sample_to_json_line(const Sample& s);
Sample sample_from_json_line(const std::string& line, const std::string& origin);

}  // namespace mutec
