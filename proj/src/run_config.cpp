#include "mutec/run_config.hpp"

#include <cstdlib>

#include "json.hpp"
#include "mutec/errors.hpp"

namespace mutec {

using nlohmann::json;

RunConfig default_config(Task task, bool with_context) {
    RunConfig c;
    c.task = task;
    c.with_context = with_context;
    c.max_seq_len = with_context ? 512 : 200;
    c.n_hidden_states = (task == Task::cee) ? 4 : 12;
    return c;
}

std::string RunConfig::to_json() const {
    json j;
    j["task"] = to_string(task);
    j["fold_id"] = fold_id;
    j["balanced"] = balanced;
    j["with_context"] = with_context;
    j["encoder_kind"] = encoder.kind;
    j["encoder_dim"] = encoder.dim;
    j["encoder_layers"] = encoder.layers;
    j["encoder_heads"] = encoder.heads;
    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    j["max_seq_len"] = max_seq_len;
    j["lr"] = lr;
    j["weight_decay"] = weight_decay;
    j["warmup_steps"] = warmup_steps;
    j["max_answer_length"] = max_answer_length;
    j["n_hidden_states"] = n_hidden_states;
    j["msd_p"] = msd_p;
    j["msd_k"] = msd_k;
    j["msd_aggregate"] = msd_aggregate;
    j["dropout_p"] = dropout_p;
    j["beam_width"] = beam_width;
    j["bilstm_hidden"] = bilstm_hidden;
    j["beta"] = beta;
    j["emotion_prediction_enabled"] = emotion_prediction_enabled;
    j["emotion_hidden"] = emotion_hidden;
    j["seed"] = seed;
    j["data_dir"] = data_dir;
    j["out_dir"] = out_dir;
    return j.dump(2);
}

namespace {

json parse_object(const std::string& text, const std::string& origin) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ParseError(origin + ": config must be a JSON object");
    return j;
}

template <typename T>
void take(json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    out = it->get<T>();
    j.erase(it);
}

}  // namespace

void apply_config_json(RunConfig& c, const std::string& text, const std::string& origin) {
    json j = parse_object(text, origin);
    if (auto it = j.find("task"); it != j.end()) {
        c.task = parse_task(it->get<std::string>());
        j.erase(it);
    }
    take(j, "fold_id", c.fold_id);
    take(j, "balanced", c.balanced);
    take(j, "with_context", c.with_context);
    take(j, "encoder_kind", c.encoder.kind);
    take(j, "encoder_dim", c.encoder.dim);
    take(j, "encoder_layers", c.encoder.layers);
    take(j, "encoder_heads", c.encoder.heads);
    take(j, "epochs", c.epochs);
    take(j, "batch_size", c.batch_size);
    take(j, "max_seq_len", c.max_seq_len);
    take(j, "lr", c.lr);
    take(j, "weight_decay", c.weight_decay);
    take(j, "warmup_steps", c.warmup_steps);
    take(j, "max_answer_length", c.max_answer_length);
    take(j, "n_hidden_states", c.n_hidden_states);
    take(j, "msd_p", c.msd_p);
    take(j, "msd_k", c.msd_k);
    take(j, "msd_aggregate", c.msd_aggregate);
    take(j, "dropout_p", c.dropout_p);
    take(j, "beam_width", c.beam_width);
    take(j, "bilstm_hidden", c.bilstm_hidden);
    take(j, "beta", c.beta);
    take(j, "emotion_prediction_enabled", c.emotion_prediction_enabled);
    take(j, "emotion_hidden", c.emotion_hidden);
    take(j, "seed", c.seed);
    take(j, "data_dir", c.data_dir);
    take(j, "out_dir", c.out_dir);
    if (!j.empty())
        throw ConfigError(origin + ": unknown config key '" + j.begin().key() + "'");
    if (c.msd_aggregate != "logits" && c.msd_aggregate != "loss")
        throw ConfigError(origin + ": msd_aggregate must be 'logits' or 'loss'");
    c.encoder.seed = c.seed;
}

RunConfig config_from_json(const std::string& text, const std::string& origin) {
    json probe = parse_object(text, origin);
    Task task = Task::cse;
    bool with_context = true;
    if (probe.contains("task")) task = parse_task(probe["task"].get<std::string>());
    if (probe.contains("with_context")) with_context = probe["with_context"].get<bool>();
    RunConfig c = default_config(task, with_context);
    apply_config_json(c, text, origin);
    return c;
}

std::filesystem::path resolve_data_dir(const RunConfig& config) {
    if (!config.data_dir.empty()) return config.data_dir;
    if (const char* env = std::getenv("MUTEC_DATA_ROOT"); env && *env) return env;
    return ".";
}

std::string fold_file_name(int fold_id, bool balanced, Split split) {
    std::string name = "fold" + std::to_string(fold_id);
    if (balanced) name += ".balanced";
    name += ".";
    name += to_string(split);
    name += ".jsonl";
    return name;
}

}  // namespace mutec
