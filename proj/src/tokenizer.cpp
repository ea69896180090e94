#include "mutec/tokenizer.hpp"

#include <cctype>
#include <cstring>

#include "mutec/errors.hpp"
#include "mutec/rng.hpp"

namespace mutec {

namespace {

bool is_word_char(unsigned char c) { return !std::isspace(c) && !std::ispunct(c); }

uint64_t word_token_id(const std::string& surface) {
    std::string lower;
    lower.reserve(surface.size());
    for (unsigned char c : surface) lower += static_cast<char>(std::tolower(c));
    // Offset past the reserved special ids.
    return 256 + (fnv1a64(lower) & 0xffffffffULL);
}

}  // namespace

TokenizedInput tokenize(const std::string& input_text, int max_len) {
    if (max_len < 1) throw ConfigError("max_len must be at least 1");
    TokenizedInput tok;
    tok.text = input_text;
    tok.token_ids.push_back(kBosTokenId);
    tok.char_offsets.emplace_back(-1, -1);

    const size_t n = input_text.size();
    const size_t sep_len = std::strlen(kSepToken);
    size_t i = 0;
    std::vector<std::pair<size_t, size_t>> pieces;  // (begin, end) per surface token
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(input_text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (input_text.compare(i, sep_len, kSepToken) == 0) {
            pieces.emplace_back(i, i + sep_len);
            i += sep_len;
            continue;
        }
        if (std::ispunct(c)) {
            pieces.emplace_back(i, i + 1);
            ++i;
            continue;
        }
        size_t j = i + 1;
        while (j < n && is_word_char(static_cast<unsigned char>(input_text[j])) &&
               input_text.compare(j, sep_len, kSepToken) != 0)
            ++j;
        pieces.emplace_back(i, j);
        i = j;
    }

    for (const auto& [begin, end] : pieces) {
        if (tok.size() >= max_len) {
            tok.truncated = true;
            break;
        }
        const std::string surface = input_text.substr(begin, end - begin);
        tok.token_ids.push_back(surface == kSepToken ? kSepTokenId : word_token_id(surface));
        tok.char_offsets.emplace_back(static_cast<int>(begin), static_cast<int>(end));
    }
    tok.attention_mask.assign(tok.token_ids.size(), 1);
    return tok;
}

TokenizedInput tokenize(const FormattedInput& input, int max_len) {
    TokenizedInput tok = tokenize(input.input_text, max_len);
    tok.target_range = input.target_range;
    tok.candidate_range = input.candidate_range;
    tok.context_range = input.context_range;
    return tok;
}

std::pair<int, int> char_span_to_token_span(const TokenizedInput& tok, const CharSpan& span) {
    if (span.char_start == span.char_end) return {0, 0};
    if (span.char_start < 0 || span.char_end > static_cast<int>(tok.text.size()) ||
        span.char_start > span.char_end)
        throw AlignmentError("char span [" + std::to_string(span.char_start) + "," +
                             std::to_string(span.char_end) + ") outside text of length " +
                             std::to_string(tok.text.size()));

    int start_tok = -1, end_tok = -1;
    for (int t = 0; t < tok.size(); ++t) {
        const auto& [b, e] = tok.char_offsets[static_cast<size_t>(t)];
        if (b < 0) continue;
        if (b <= span.char_start) start_tok = t;
        if (end_tok < 0 && e >= span.char_end) end_tok = t;
    }
    if (start_tok < 0 || end_tok < 0) {
        if (tok.truncated)
            throw SpanLostError("gold span [" + std::to_string(span.char_start) + "," +
                                std::to_string(span.char_end) +
                                ") lies beyond the truncated input");
        throw AlignmentError("no tokens cover char span [" + std::to_string(span.char_start) +
                             "," + std::to_string(span.char_end) + ")");
    }
    if (end_tok < start_tok) end_tok = start_tok;
    return {start_tok, end_tok};
}

CharSpan token_span_to_char_span(const TokenizedInput& tok, int tok_start, int tok_end) {
    if (tok_start == 0 && tok_end == 0) return CharSpan{0, 0};
    if (tok_start < 0 || tok_end >= tok.size() || tok_start > tok_end)
        throw InputError("token span (" + std::to_string(tok_start) + "," +
                         std::to_string(tok_end) + ") out of range for " +
                         std::to_string(tok.size()) + " tokens");
    int begin = -1, end = -1;
    for (int t = tok_start; t <= tok_end; ++t) {
        const auto& [b, e] = tok.char_offsets[static_cast<size_t>(t)];
        if (b < 0) continue;
        if (begin < 0) begin = b;
        end = e;
    }
    if (begin < 0) return CharSpan{0, 0};
    return CharSpan{begin, end};
}

std::string span_text(const TokenizedInput& tok, int tok_start, int tok_end) {
    const CharSpan span = token_span_to_char_span(tok, tok_start, tok_end);
    return tok.text.substr(static_cast<size_t>(span.char_start),
                           static_cast<size_t>(span.char_end - span.char_start));
}

}  // namespace mutec
