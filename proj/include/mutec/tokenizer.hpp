#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mutec/fold.hpp"
#include "mutec/input_format.hpp"

namespace mutec {

inline constexpr uint64_t kBosTokenId = 1;
inline constexpr uint64_t kSepTokenId = 2;

// Whitespace + punctuation tokenization with character offsets. Position 0 is
// always a BOS special with sentinel offsets (-1,-1); "<SEP>" is one token
// with real offsets; every other punctuation character is its own token.
// Word token ids hash the lowercased surface so identical words share an id.
struct TokenizedInput {
    std::string text;
    std::vector<uint64_t> token_ids;
    std::vector<int> attention_mask;
    std::vector<std::pair<int, int>> char_offsets;  // (-1,-1) for specials
    std::pair<int, int> target_range{0, 0};
    std::pair<int, int> candidate_range{0, 0};
    std::pair<int, int> context_range{0, 0};
    bool truncated = false;

    int size() const { return static_cast<int>(token_ids.size()); }
};

TokenizedInput tokenize(const std::string& input_text, int max_len);
// Carries the segment ranges of the formatted input along.
TokenizedInput tokenize(const FormattedInput& input, int max_len);

// Smallest token interval [tok_start, tok_end] whose character range covers
// the span; the empty span maps to (0,0), the BOS position. Throws
// SpanLostError when truncation removed the covering tokens, AlignmentError
// when the span never was inside the text.
std::pair<int, int> char_span_to_token_span(const TokenizedInput& tok, const CharSpan& span);

// Character range covered by tokens [tok_start, tok_end]; (0,0) for the empty
// span convention.
CharSpan token_span_to_char_span(const TokenizedInput& tok, int tok_start, int tok_end);

// Text covered by a predicted token span; empty for (0,0).
std::string span_text(const TokenizedInput& tok, int tok_start, int tok_end);

}  // namespace mutec
