#include "mutec/dialogue.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mutec/errors.hpp"

namespace mutec {

using nlohmann::json;

void Dialogue::validate() const {
    if (id.empty()) throw ParseError("dialogue with empty id");
    const int n = static_cast<int>(utterances.size());
    std::set<int> seen;
    for (const auto& u : utterances) {
        if (u.index < 0 || u.index >= n)
            throw ParseError("dialogue '" + id + "': utterance index " +
                             std::to_string(u.index) + " out of range");
        if (!seen.insert(u.index).second)
            throw ParseError("dialogue '" + id + "': duplicate utterance index " +
                             std::to_string(u.index));
        if (u.text.empty())
            throw ParseError("dialogue '" + id + "': empty utterance text at index " +
                             std::to_string(u.index));
    }
    for (const auto& [target, anns] : causes) {
        if (target < 0 || target >= n)
            throw AnnotationError("dialogue '" + id + "': cause target index " +
                                  std::to_string(target) + " out of range");
        for (const auto& ann : anns) {
            if (ann.cause_index < 0 || ann.cause_index >= n)
                throw AnnotationError("dialogue '" + id + "': cause index " +
                                      std::to_string(ann.cause_index) + " out of range");
            const std::string& cause_text = utterances[ann.cause_index].text;
            if (ann.span.empty() || cause_text.find(ann.span) == std::string::npos)
                throw AnnotationError("dialogue '" + id + "': span '" + ann.span +
                                      "' not found in cause utterance " +
                                      std::to_string(ann.cause_index));
        }
    }
}

CorpusKind parse_corpus_kind(const std::string& name) {
    if (name == "DD" || name == "dd") return CorpusKind::DD;
    if (name == "IEMO" || name == "iemo") return CorpusKind::IEMO;
    throw ConfigError("unknown corpus kind: '" + name + "' (expected DD or IEMO)");
}

const char* to_string(CorpusKind kind) { return kind == CorpusKind::DD ? "DD" : "IEMO"; }

namespace {

Dialogue dialogue_from_json(const json& rec, CorpusKind kind) {
    Dialogue d;
    try {
        d.id = rec.at("id").get<std::string>();
        int idx = 0;
        for (const auto& ju : rec.at("utterances")) {
            Utterance u;
            u.index = idx++;
            u.speaker = ju.value("speaker", "");
            u.text = ju.at("text").get<std::string>();
            const std::string raw = ju.at("emotion").get<std::string>();
            u.emotion = kind == CorpusKind::IEMO ? map_iemocap_emotion(raw) : parse_emotion(raw);
            d.utterances.push_back(std::move(u));
        }
        if (rec.contains("causes")) {
            for (const auto& jc : rec.at("causes")) {
                CauseAnnotation ann;
                const int target = jc.at("target_idx").get<int>();
                ann.cause_index = jc.at("cause_idx").get<int>();
                ann.span = jc.at("span").get<std::string>();
                d.causes[target].push_back(std::move(ann));
            }
        }
    } catch (const json::exception& e) {
        const std::string id = rec.is_object() && rec.contains("id") && rec["id"].is_string()
                                   ? rec["id"].get<std::string>()
                                   : "<missing id>";
        throw ParseError("dialogue '" + id + "': " + e.what());
    }
    d.validate();
    return d;
}

}  // namespace

std::vector<Dialogue> parse_corpus_text(const std::string& text, CorpusKind kind,
                                        const std::string& origin) {
    std::vector<Dialogue> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return out;

    if (text[first] == '[') {
        json arr;
        try {
            arr = json::parse(text);
        } catch (const json::exception& e) {
            throw ParseError(origin + ": " + e.what());
        }
        for (const auto& rec : arr) out.push_back(dialogue_from_json(rec, kind));
        return out;
    }

    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(dialogue_from_json(rec, kind));
    }
    return out;
}

std::vector<Dialogue> load_corpus(const std::filesystem::path& path, CorpusKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open corpus file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_corpus_text(buf.str(), kind, path.string());
}

void write_corpus(const std::filesystem::path& path, const std::vector<Dialogue>& dialogues) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open corpus file for writing: " + path.string());
    for (const auto& d : dialogues) {
        json rec;
        rec["id"] = d.id;
        rec["utterances"] = json::array();
        for (const auto& u : d.utterances) {
            rec["utterances"].push_back(
                {{"speaker", u.speaker}, {"text", u.text}, {"emotion", to_string(u.emotion)}});
        }
        rec["causes"] = json::array();
        for (const auto& [target, anns] : d.causes) {
            for (const auto& ann : anns) {
                rec["causes"].push_back({{"target_idx", target},
                                         {"cause_idx", ann.cause_index},
                                         {"span", ann.span}});
            }
        }
        out << rec.dump() << "\n";
    }
}

}  // namespace mutec
