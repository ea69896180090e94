#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mutec/encoder.hpp"
#include "mutec/fold.hpp"
#include "mutec/input_format.hpp"

namespace mutec {

// Everything a run needs: task selection, data location, model and optimizer
// knobs. Defaults mirror the published hyperparameter table; the task- and
// context-dependent ones (max_seq_len, n_hidden_states) are resolved by
// default_config.
struct RunConfig {
    Task task = Task::cse;
    int fold_id = 1;
    bool balanced = false;
    bool with_context = true;

    EncoderConfig encoder;  // toy encoder by default

    int epochs = 12;
    int batch_size = 16;
    int max_seq_len = 512;
    double lr = 4e-5;
    double weight_decay = 0.001;
    long warmup_steps = 4;
    int max_answer_length = 200;
    int n_hidden_states = 12;
    double msd_p = 0.5;
    int msd_k = 5;
    std::string msd_aggregate = "logits";  // or "loss"
    double dropout_p = 0.1;               // feature dropout on the entail input
    int beam_width = 3;
    int bilstm_hidden = 384;
    double beta = 1.0;
    bool emotion_prediction_enabled = true;
    int emotion_hidden = -1;  // emotion head hidden width; -1: encoder dim, 0: single layer
    uint64_t seed = 0;

    std::string data_dir;  // resolved against MUTEC_DATA_ROOT when empty
    std::string out_dir = "runs";

    std::string to_json() const;
};

// Published defaults for a task: max_seq_len 512 with context / 200 without;
// n_hidden_states 12 for span tasks / 4 for entailment.
RunConfig default_config(Task task, bool with_context = true);

// Applies the keys present in a JSON object over an existing config. Unknown
// keys raise ConfigError naming the key.
void apply_config_json(RunConfig& config, const std::string& json_text,
                       const std::string& origin);

RunConfig config_from_json(const std::string& json_text, const std::string& origin);

// Data root resolution: explicit config value, else MUTEC_DATA_ROOT, else ".".
std::filesystem::path resolve_data_dir(const RunConfig& config);

// Canonical fold file name: fold<id>[.balanced].<split>.jsonl
std::string fold_file_name(int fold_id, bool balanced, Split split);

}  // namespace mutec
