#include "mutec/fold.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <tuple>

#include "mutec/errors.hpp"
#include "mutec/rng.hpp"
#include "json.hpp"

namespace mutec {

using json = nlohmann::json;

Split parse_split(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "val") return Split::val;
    if (name == "test") return Split::test;
    throw ConfigError("unknown split '" + name + "' (expected train|val|test)");
}

const char* to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

long default_negative_total(int fold_id, Split split) {
    if (fold_id != 2 && fold_id != 3)
        throw ConfigError("negative totals only apply to folds 2 and 3");
    switch (split) {
        case Split::train: return 18428;
        case Split::val: return 800;
        case Split::test: return 4396;
    }
    return 0;
}

std::string context_up_to(const Dialogue& d, int upto) {
    std::string out;
    for (int i = 0; i <= upto; ++i) {
        if (i > 0) out += ' ';
        out += d.utterances[static_cast<size_t>(i)].text;
    }
    return out;
}

std::pair<int, int> utterance_range_in_context(const Dialogue& d, int upto, int idx) {
    if (idx > upto)
        throw InputError("utterance " + std::to_string(idx) + " lies outside the history of " +
                         std::to_string(upto) + " in dialogue '" + d.id + "'");
    int begin = 0;
    for (int i = 0; i < idx; ++i)
        begin += static_cast<int>(d.utterances[static_cast<size_t>(i)].text.size()) + 1;
    int end = begin + static_cast<int>(d.utterances[static_cast<size_t>(idx)].text.size());
    return {begin, end};
}

CharSpan locate_span(const std::string& context, int range_begin, int range_end,
                     const std::string& span_text, const std::string& origin) {
    if (span_text.empty()) throw AlignmentError(origin + ": empty span text");
    size_t pos = context.find(span_text, static_cast<size_t>(range_begin));
    while (pos != std::string::npos &&
           pos + span_text.size() > static_cast<size_t>(range_end)) {
        pos = context.find(span_text, pos + 1);
    }
    if (pos == std::string::npos)
        throw AlignmentError(origin + ": span '" + span_text +
                             "' not found inside the candidate region of the context");
    return CharSpan{static_cast<int>(pos), static_cast<int>(pos + span_text.size())};
}

namespace {

struct TargetRef {
    size_t dialogue = 0;  // index into the dialogue list
    int utterance = 0;
};

}  // namespace

std::vector<Sample> build_fold(const std::vector<Dialogue>& dialogues, const FoldSpec& spec) {
    if (spec.fold_id < 1 || spec.fold_id > 3)
        throw ConfigError("fold id must be 1, 2 or 3");
    for (const auto& d : dialogues) d.validate();

    std::vector<Sample> out;

    // Targets in canonical order: (dialogue id, target index). Quota
    // distribution for fold 2/3 follows this order.
    std::vector<size_t> order(dialogues.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return dialogues[a].id < dialogues[b].id;
    });

    std::vector<TargetRef> targets;
    for (size_t di : order) {
        const Dialogue& d = dialogues[di];
        for (const auto& [tidx, anns] : d.causes) {
            if (d.utterances[static_cast<size_t>(tidx)].emotion == Emotion::neutral) continue;
            if (anns.empty()) continue;
            targets.push_back(TargetRef{di, tidx});
        }
    }

    // Positives: one sample per annotation, identical across folds.
    for (const TargetRef& t : targets) {
        const Dialogue& d = dialogues[t.dialogue];
        const Utterance& tu = d.utterances[static_cast<size_t>(t.utterance)];
        const std::string ctx = context_up_to(d, t.utterance);
        for (const CauseAnnotation& ann : d.causes.at(t.utterance)) {
            const Utterance& cu = d.utterances[static_cast<size_t>(ann.cause_index)];
            auto [cb, ce] = utterance_range_in_context(d, t.utterance, ann.cause_index);
            CharSpan span = locate_span(ctx, cb, ce, ann.span,
                                        "dialogue '" + d.id + "' target " +
                                            std::to_string(t.utterance));
            Sample s;
            s.dialogue_id = d.id;
            s.target = tu;
            s.candidate = cu;
            s.context = ctx;
            s.emotion = tu.emotion;
            s.gold_span = span;
            s.entail_label = 1;
            s.fold = spec.fold_id;
            s.with_context = spec.with_context;
            out.push_back(std::move(s));
        }
    }

    if (spec.fold_id == 1) {
        for (const TargetRef& t : targets) {
            const Dialogue& d = dialogues[t.dialogue];
            const Utterance& tu = d.utterances[static_cast<size_t>(t.utterance)];
            const std::string ctx = context_up_to(d, t.utterance);
            std::set<int> cause_set;
            for (const CauseAnnotation& ann : d.causes.at(t.utterance))
                cause_set.insert(ann.cause_index);
            // Negative candidates are the strictly preceding non-cause
            // utterances; the target itself is never paired as a negative.
            std::vector<int> negatives;
            for (int i = 0; i < t.utterance; ++i)
                if (!cause_set.count(i)) negatives.push_back(i);
            if (spec.balanced && negatives.size() > 2) {
                // Keep the two history utterances closest to the target.
                std::sort(negatives.begin(), negatives.end(), std::greater<int>());
                negatives.resize(2);
                std::sort(negatives.begin(), negatives.end());
            }
            for (int i : negatives) {
                Sample s;
                s.dialogue_id = d.id;
                s.target = tu;
                s.candidate = d.utterances[static_cast<size_t>(i)];
                s.context = ctx;
                s.emotion = tu.emotion;
                s.entail_label = 0;
                s.fold = spec.fold_id;
                s.with_context = spec.with_context;
                out.push_back(std::move(s));
            }
        }
    } else {
        // Foreign pools: every utterance of every dialogue, optionally keyed
        // by emotion for fold 3. Same-dialogue entries are rejected per
        // target at draw time.
        std::vector<std::pair<size_t, int>> pool;
        std::map<Emotion, std::vector<std::pair<size_t, int>>> pool_by_emotion;
        for (size_t di : order) {
            const Dialogue& d = dialogues[di];
            for (const Utterance& u : d.utterances) {
                pool.emplace_back(di, u.index);
                pool_by_emotion[u.emotion].emplace_back(di, u.index);
            }
        }

        const long total = spec.balanced
                               ? 2 * static_cast<long>(targets.size())
                               : spec.negative_total.value_or(
                                     default_negative_total(spec.fold_id, spec.split));
        const long t_count = static_cast<long>(targets.size());
        if (total > 0 && t_count == 0)
            throw SamplingError("cannot draw negatives: the corpus has no annotated targets");
        const long base = t_count > 0 ? total / t_count : 0;
        const long rem = t_count > 0 ? total % t_count : 0;

        for (long ti = 0; ti < t_count; ++ti) {
            const TargetRef& t = targets[static_cast<size_t>(ti)];
            const Dialogue& d = dialogues[t.dialogue];
            const Utterance& tu = d.utterances[static_cast<size_t>(t.utterance)];
            long quota = spec.balanced ? 2 : base + (ti < rem ? 1 : 0);
            if (quota == 0) continue;

            const auto* draw_pool = &pool;
            if (spec.fold_id == 3) {
                auto it = pool_by_emotion.find(tu.emotion);
                if (it == pool_by_emotion.end() || it->second.empty())
                    throw SamplingError("fold 3: no candidate utterances share emotion '" +
                                        to_string(tu.emotion) + "'");
                draw_pool = &it->second;
            }

            auto engine = make_engine(mix_seed(spec.seed, d.id,
                                               static_cast<uint64_t>(t.utterance)));
            std::uniform_int_distribution<size_t> pick(0, draw_pool->size() - 1);
            std::set<std::pair<size_t, int>> seen;
            long drawn = 0;
            long attempts = 0;
            const long max_attempts = 1000 * quota + 10000;
            while (drawn < quota) {
                if (++attempts > max_attempts) {
                    std::string detail = spec.fold_id == 3
                                             ? " sharing emotion '" + to_string(tu.emotion) + "'"
                                             : "";
                    throw SamplingError("fold " + std::to_string(spec.fold_id) +
                                        ": not enough foreign utterances" + detail +
                                        " to draw " + std::to_string(quota) +
                                        " negatives for dialogue '" + d.id + "' target " +
                                        std::to_string(t.utterance));
                }
                auto entry = (*draw_pool)[pick(engine)];
                if (entry.first == t.dialogue) continue;
                if (!seen.insert(entry).second) continue;
                const Dialogue& fd = dialogues[entry.first];
                const Utterance& cu = fd.utterances[static_cast<size_t>(entry.second)];
                Sample s;
                s.dialogue_id = d.id;
                s.target = tu;
                s.candidate = cu;
                s.context = context_up_to(fd, entry.second);
                s.emotion = tu.emotion;
                s.entail_label = 0;
                s.fold = spec.fold_id;
                s.with_context = spec.with_context;
                out.push_back(std::move(s));
                ++drawn;
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const Sample& a, const Sample& b) {
        auto key = [](const Sample& s) {
            return std::make_tuple(std::cref(s.dialogue_id), s.target.index, s.candidate.index,
                                   s.gold_span ? s.gold_span->char_start : -1,
                                   s.gold_span ? s.gold_span->char_end : -1,
                                   std::cref(s.candidate.text), std::cref(s.context));
        };
        return key(a) < key(b);
    });
    return out;
}

FoldCounts count_fold(const std::vector<Sample>& samples) {
    FoldCounts c;
    for (const Sample& s : samples) (s.entail_label == 1 ? c.positives : c.negatives)++;
    return c;
}

std::string sample_id(const Sample& s) {
    std::string key = s.dialogue_id;
    key += '\x1f';
    key += std::to_string(s.target.index);
    key += '\x1f';
    key += std::to_string(s.candidate.index);
    key += '\x1f';
    key += s.candidate.text;
    key += '\x1f';
    key += s.context;
    key += '\x1f';
    key += std::to_string(s.entail_label);
    key += '\x1f';
    if (s.gold_span) {
        key += std::to_string(s.gold_span->char_start);
        key += ':';
        key += std::to_string(s.gold_span->char_end);
    }
    key += '\x1f';
    key += std::to_string(s.fold);
    key += '\x1f';
    key += s.with_context ? '1' : '0';
    uint64_t h = fnv1a64(key);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

namespace {

json utterance_to_json(const Utterance& u) {
    return json{{"index", u.index},
                {"speaker", u.speaker},
                {"text", u.text},
                {"emotion", to_string(u.emotion)}};
}

Utterance utterance_from_json(const json& j, const std::string& origin) {
    if (!j.is_object()) throw ParseError(origin + ": utterance record is not an object");
    Utterance u;
    u.index = j.at("index").get<int>();
    u.speaker = j.at("speaker").get<std::string>();
    u.text = j.at("text").get<std::string>();
    u.emotion = parse_emotion(j.at("emotion").get<std::string>());
    return u;
}

}  // namespace

std::string sample_to_json_line(const Sample& s) {
    json j;
    j["dialogue_id"] = s.dialogue_id;
    j["target"] = utterance_to_json(s.target);
    j["candidate"] = utterance_to_json(s.candidate);
    j["context"] = s.context;
    j["emotion"] = to_string(s.emotion);
    if (s.gold_span)
        j["gold_span"] = json{{"char_start", s.gold_span->char_start},
                              {"char_end", s.gold_span->char_end}};
    else
        j["gold_span"] = nullptr;
    j["entail_label"] = s.entail_label;
    j["fold"] = s.fold;
    j["with_context"] = s.with_context;
    return j.dump();
}

Sample sample_from_json_line(const std::string& line, const std::string& origin) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    try {
        Sample s;
        s.dialogue_id = j.at("dialogue_id").get<std::string>();
        s.target = utterance_from_json(j.at("target"), origin);
        s.candidate = utterance_from_json(j.at("candidate"), origin);
        s.context = j.at("context").get<std::string>();
        s.emotion = parse_emotion(j.at("emotion").get<std::string>());
        const json& gs = j.at("gold_span");
        if (!gs.is_null())
            s.gold_span = CharSpan{gs.at("char_start").get<int>(), gs.at("char_end").get<int>()};
        s.entail_label = j.at("entail_label").get<int>();
        s.fold = j.at("fold").get<int>();
        s.with_context = j.at("with_context").get<bool>();
        if ((s.entail_label == 1) != s.gold_span.has_value())
            throw ParseError(origin + ": entail_label and gold_span disagree for sample of '" +
                             s.dialogue_id + "'");
        return s;
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

void write_fold(const std::filesystem::path& path, const std::vector<Sample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
    for (const Sample& s : samples) out << sample_to_json_line(s) << '\n';
    if (!out) throw InputError("failed writing fold file '" + path.string() + "'");
}

std::vector<Sample> read_fold(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open fold file '" + path.string() + "'");
    std::vector<Sample> samples;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        samples.push_back(sample_from_json_line(
            line, path.filename().string() + ":" + std::to_string(lineno)));
    }
    return samples;
}

}  // namespace mutec
