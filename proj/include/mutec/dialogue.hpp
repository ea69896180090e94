#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mutec/emotion.hpp"

namespace mutec {

struct Utterance {
    int index = 0;
    std::string speaker;
    std::string text;
    Emotion emotion = Emotion::neutral;
};

struct CauseAnnotation {
    int cause_index = 0;
    std::string span;
};

// One annotated conversation. `causes` maps a target utterance index to the
// utterances (and span texts) that cause its emotion.
struct Dialogue {
    std::string id;
    std::vector<Utterance> utterances;
    std::map<int, std::vector<CauseAnnotation>> causes;

    // Throws ParseError/AnnotationError naming this dialogue when an
    // invariant is broken (bad indices, empty text, span not found in the
    // cause utterance).
    void validate() const;
};

enum class CorpusKind { DD, IEMO };

CorpusKind parse_corpus_kind(const std::string& name);
const char* to_string(CorpusKind kind);

// Loads a corpus file: one JSON record per line, schema
//   {id, utterances: [{speaker, text, emotion}], causes: [{target_idx, cause_idx, span}]}
// A leading '[' is also accepted (whole-file JSON array). IEMO corpora carry
// raw IEMOCAP emotion labels which are mapped to the canonical inventory.
std::vector<Dialogue> load_corpus(const std::filesystem::path& path, CorpusKind kind);

std::vector<Dialogue> parse_corpus_text(const std::string& text, CorpusKind kind,
                                        const std::string& origin);

void write_corpus(const std::filesystem::path& path, const std::vector<Dialogue>& dialogues);

}  // namespace mutec
