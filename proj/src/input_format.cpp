#include "mutec/input_format.hpp"

#include "mutec/errors.hpp"

namespace mutec {

Task parse_task(const std::string& name) {
    if (name == "cse") return Task::cse;
    if (name == "cee") return Task::cee;
    if (name == "e2e") return Task::e2e;
    throw ConfigError("unknown task '" + name + "' (expected cse|cee|e2e)");
}

const char* to_string(Task t) {
    switch (t) {
        case Task::cse: return "cse";
        case Task::cee: return "cee";
        case Task::e2e: return "e2e";
    }
    return "?";
}

FormattedInput format_input(const Sample& sample, Task task) {
    const bool span_task = task != Task::cee;
    FormattedInput f;
    f.entail_label = sample.entail_label;

    const std::string& ut = sample.target.text;
    const std::string& ui = sample.candidate.text;

    if (!sample.with_context && task == Task::cee) {
        f.input_text = ut + " " + kSepToken + " " + ui;
        f.target_range = {0, static_cast<int>(ut.size())};
        int ui_begin = static_cast<int>(ut.size()) + 7;
        f.candidate_range = {ui_begin, ui_begin + static_cast<int>(ui.size())};
        return f;
    }

    f.input_text = ut + ". " + ui;
    f.target_range = {0, static_cast<int>(ut.size())};
    int ui_begin = static_cast<int>(ut.size()) + 2;
    f.candidate_range = {ui_begin, ui_begin + static_cast<int>(ui.size())};

    if (sample.with_context) {
        f.input_text += " ";
        f.input_text += kSepToken;
        f.input_text += " ";
        int ctx_begin = static_cast<int>(f.input_text.size());
        f.input_text += sample.context;
        f.context_range = {ctx_begin, static_cast<int>(f.input_text.size())};
        if (span_task && sample.gold_span) {
            // The sample's span indexes the context string, which is embedded
            // verbatim; shift it into input coordinates.
            f.gold_span = CharSpan{ctx_begin + sample.gold_span->char_start,
                                   ctx_begin + sample.gold_span->char_end};
        }
    } else if (span_task && sample.gold_span) {
        const std::string span_text =
            sample.context.substr(static_cast<size_t>(sample.gold_span->char_start),
                                  static_cast<size_t>(sample.gold_span->char_end -
                                                      sample.gold_span->char_start));
        f.gold_span = locate_span(f.input_text, f.candidate_range.first,
                                  f.candidate_range.second, span_text,
                                  "dialogue '" + sample.dialogue_id + "' target " +
                                      std::to_string(sample.target.index));
    }
    return f;
}

}  // namespace mutec
