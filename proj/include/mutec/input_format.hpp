#pragma once

#include <optional>
#include <string>

#include "mutec/fold.hpp"

namespace mutec {

enum class Task { cse, cee, e2e };

Task parse_task(const std::string& name);
const char* to_string(Task t);

inline constexpr const char* kSepToken = "<SEP>";

// Model input assembled from a Sample. Ranges are half-open character spans
// into input_text; context_range is (0,0) when the input carries no context
// segment. gold_span (also into input_text) is present for span-extraction
// positives only.
struct FormattedInput {
    std::string input_text;
    std::pair<int, int> target_range{0, 0};
    std::pair<int, int> candidate_range{0, 0};
    std::pair<int, int> context_range{0, 0};
    std::optional<CharSpan> gold_span;
    int entail_label = 0;
};

// Input shapes:
//   span tasks, with context:  "U_t. U_i <SEP> Context"
//   span tasks, no context:    "U_t. U_i"
//   entailment, with context:  "U_t. U_i <SEP> Context"
//   entailment, no context:    "U_t <SEP> U_i"
// The span gold lands in the context segment (with context) or in the U_i
// segment (without); first occurrence within the candidate's region.
FormattedInput format_input(const Sample& sample, Task task);

}  // namespace mutec
