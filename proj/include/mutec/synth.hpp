#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mutec/dialogue.hpp"
#include "mutec/fold.hpp"

namespace mutec {

// Per-target shape of a generated split: p positives (cause annotations) and
// n same-dialogue non-cause utterances. Every generated dialogue carries one
// annotated target as its last utterance; causes are the trailing p
// utterances (the target causes itself), the leading n are non-causes, so a
// dialogue contributes exactly p positives and n fold-1 negatives.
struct TargetShape {
    int positives = 1;
    int negatives = 0;
};

// Splits a split-level statistics row (targets T, positives P, fold-1
// negatives N, balanced fold-1 negatives B) into per-target shapes such that
// sum p = P, sum n = N and sum min(2, n) = B. Throws ConfigError when the
// row is not representable.
std::vector<TargetShape> decompose_split(long targets, long positives, long negatives,
                                         long balanced_negatives);

// Deterministic synthetic corpora.
//   reccon-dd  one dialogue per target, sized so every fold statistic of the
//              published DailyDialog split is reproduced exactly
//   overfit    six tiny dialogues whose fold 1 holds 10 samples covering all
//              six emotions (6 positives, 4 negatives)
//   tiny       eighteen small dialogues for smoke tests; every emotion occurs
//              as a target emotion three times so fold 3 (balanced too) is
//              drawable with small negative totals
std::vector<Dialogue> make_synth_corpus(const std::string& profile, Split split, uint64_t seed);

std::vector<std::string> synth_profiles();

}  // namespace mutec
