#include "mutec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "mutec/cee_model.hpp"
#include "mutec/checkpoint.hpp"
#include "mutec/cse_model.hpp"
#include "mutec/e2e_model.hpp"
#include "mutec/errors.hpp"
#include "mutec/nn.hpp"
#include "mutec/rng.hpp"

namespace mutec {

namespace fs = std::filesystem;
using nlohmann::json;

PreparedFold prepare_fold(const std::vector<Sample>& samples, Task task, int max_seq_len) {
    PreparedFold out;
    out.emotion_counts.assign(kNumCauseEmotions, 0);
    if (!samples.empty()) {
        out.fold_id = samples.front().fold;
        out.with_context = samples.front().with_context;
    }
    for (const Sample& s : samples) {
        const FormattedInput formatted = format_input(s, task);
        TokenizedInput tok = tokenize(formatted, max_seq_len);
        PreparedSample p;
        p.id = sample_id(s);
        p.entail_label = s.entail_label;
        p.emotion_class = emotion_class_index(s.emotion);
        if (s.gold_span)
            p.gold_text = s.context.substr(
                static_cast<size_t>(s.gold_span->char_start),
                static_cast<size_t>(s.gold_span->char_end - s.gold_span->char_start));
        if (formatted.gold_span) {
            try {
                std::tie(p.gold_start, p.gold_end) = char_span_to_token_span(tok, *formatted.gold_span);
            } catch (const SpanLostError&) {
                ++out.dropped_spans;
                continue;
            }
        }
        p.tok = std::move(tok);
        ++out.entail_counts[static_cast<size_t>(p.entail_label)];
        ++out.emotion_counts[static_cast<size_t>(p.emotion_class)];
        out.samples.push_back(std::move(p));
    }
    return out;
}

namespace {

struct ModelBundle {
    explicit ModelBundle(uint64_t seed) : store(seed) {}

    ParamStore store;
    std::unique_ptr<Encoder> encoder;
    std::unique_ptr<CseModel> cse;
    std::unique_ptr<CeeModel> cee;
    std::unique_ptr<E2eModel> e2e;
};

// Builds the task model over a fresh store. Knobs that scale with the real
// encoder are clamped to the toy one: n_hidden_states to the layer count, the
// BiLSTM width to half the encoder dim when the configured value disagrees.
std::unique_ptr<ModelBundle> build_bundle(const RunConfig& config,
                                          const std::vector<double>& entail_weights,
                                          const std::vector<double>& emotion_weights,
                                          const Checkpoint* restore = nullptr) {
    auto bundle = std::make_unique<ModelBundle>(config.seed);
    if (restore) restore_into(bundle->store, *restore);
    EncoderConfig enc_cfg = config.encoder;
    enc_cfg.seed = config.seed;
    bundle->encoder = make_encoder(enc_cfg, bundle->store);
    const int nhs = std::min(config.n_hidden_states, bundle->encoder->num_layers());
    switch (config.task) {
        case Task::cse: {
            CseConfig mc;
            mc.beta = config.beta;
            mc.msd_p = config.msd_p;
            mc.msd_k = config.msd_k;
            mc.msd_aggregate_loss = config.msd_aggregate == "loss";
            mc.max_answer_length = config.max_answer_length;
            mc.n_hidden_states = nhs;
            mc.emotion_enabled = config.emotion_prediction_enabled;
            mc.emotion_hidden = config.emotion_hidden;
            bundle->cse = std::make_unique<CseModel>(mc, *bundle->encoder, bundle->store);
            break;
        }
        case Task::cee: {
            CeeConfig mc;
            mc.beta = config.beta;
            mc.bilstm_hidden =
                2 * config.bilstm_hidden == bundle->encoder->dim() ? config.bilstm_hidden : 0;
            mc.n_hidden_states = nhs;
            mc.dropout_p = config.dropout_p;
            mc.emotion_enabled = config.emotion_prediction_enabled;
            mc.entail_weights = entail_weights;
            mc.emotion_weights = emotion_weights;
            bundle->cee = std::make_unique<CeeModel>(mc, *bundle->encoder, bundle->store);
            break;
        }
        case Task::e2e: {
            E2eConfig mc;
            mc.msd_p = config.msd_p;
            mc.msd_k = config.msd_k;
            mc.msd_aggregate_loss = config.msd_aggregate == "loss";
            mc.max_answer_length = config.max_answer_length;
            mc.n_hidden_states = nhs;
            mc.emotion_enabled = config.emotion_prediction_enabled;
            mc.entail_weights = entail_weights;
            mc.emotion_weights = emotion_weights;
            bundle->e2e = std::make_unique<E2eModel>(mc, *bundle->encoder, bundle->store);
            break;
        }
    }
    return bundle;
}

Var sample_loss(Tape& tape, const ModelBundle& b, Task task, const PreparedSample& s,
                bool training, uint64_t step_seed) {
    switch (task) {
        case Task::cse:
            return b.cse
                ->forward_train(tape, s.tok, s.id, s.gold_start, s.gold_end, s.emotion_class,
                                training, step_seed)
                .loss;
        case Task::cee:
            return b.cee
                ->forward_train(tape, s.tok, s.id, s.entail_label, s.emotion_class, training,
                                step_seed)
                .loss;
        case Task::e2e:
            return b.e2e
                ->forward_train(tape, s.tok, s.id, s.gold_start, s.gold_end, s.entail_label,
                                s.emotion_class, training, step_seed)
                .loss;
    }
    throw ConfigError("unhandled task");
}

double compute_val_metric(const ModelBundle& b, const RunConfig& config,
                          const PreparedFold& fold) {
    if (fold.samples.empty()) return 0.0;
    if (config.task == Task::cee) {
        std::vector<int> gold, pred;
        gold.reserve(fold.samples.size());
        pred.reserve(fold.samples.size());
        for (const PreparedSample& s : fold.samples) {
            gold.push_back(s.entail_label);
            pred.push_back(b.cee->predict(s.tok, s.id).label);
        }
        return entail_metrics(gold, pred).macro_f1;
    }
    std::vector<SpanEvalRecord> records;
    records.reserve(fold.samples.size());
    for (const PreparedSample& s : fold.samples) {
        const SpanPrediction p = config.task == Task::cse
                                     ? b.cse->predict(s.tok, s.id, config.beam_width)
                                     : b.e2e->predict(s.tok, s.id, config.beam_width).span;
        records.push_back({s.gold_text, p.text, s.entail_label == 1});
    }
    return f1_pos(records).value_or(0.0);
}

std::string file_checksum_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const uint64_t h = fnv1a64(buf.str());
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << h;
    return hex.str();
}

json epoch_stats_json(const std::vector<EpochStats>& epochs) {
    json rows = json::array();
    for (const EpochStats& e : epochs)
        rows.push_back({{"epoch", e.epoch},
                        {"train_loss", e.train_loss},
                        {"val_loss", e.val_loss},
                        {"val_metric", e.val_metric}});
    return rows;
}

}  // namespace

TrainOutput train_run(RunConfig config, const fs::path& train_file, const fs::path& val_file,
                      const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const std::vector<Sample> train_samples = read_fold(train_file);
    const std::vector<Sample> val_samples = read_fold(val_file);
    if (train_samples.empty()) throw InputError("training fold " + train_file.string() + " is empty");

    // The fold data decides its own shape; the config snapshot follows it.
    config.fold_id = train_samples.front().fold;
    config.with_context = train_samples.front().with_context;

    const PreparedFold train_fold = prepare_fold(train_samples, config.task, config.max_seq_len);
    const PreparedFold val_fold = prepare_fold(val_samples, config.task, config.max_seq_len);
    if (train_fold.samples.empty())
        throw InputError("no usable training samples in " + train_file.string());

    std::vector<double> entail_weights{1.0, 1.0};
    std::vector<double> emotion_weights;
    if (config.task != Task::cse) {
        entail_weights = inverse_count_weights(train_fold.entail_counts);
        if (config.emotion_prediction_enabled)
            emotion_weights = inverse_count_weights(train_fold.emotion_counts);
    }

    auto bundle = build_bundle(config, entail_weights, emotion_weights);

    TrainOutput out;
    out.checkpoint_path = out_dir / "checkpoint.bin";
    out.manifest_path = out_dir / "manifest.json";
    save_checkpoint(out.checkpoint_path, config, bundle->store);

    const long n = static_cast<long>(train_fold.samples.size());
    const long batches_per_epoch = (n + config.batch_size - 1) / config.batch_size;
    const long total_steps = batches_per_epoch * config.epochs;
    AdamWConfig opt_cfg;
    opt_cfg.lr = config.lr;
    opt_cfg.weight_decay = config.weight_decay;
    AdamW opt(bundle->store, opt_cfg);

    double best_metric = -std::numeric_limits<double>::infinity();
    long step = 0;
    bool diverged = false;
    int diverged_epoch = 0;

    for (int epoch = 1; epoch <= config.epochs && !diverged; ++epoch) {
        std::vector<size_t> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        auto eng = make_engine(mix_seed(config.seed, "shuffle", static_cast<uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), eng);

        double epoch_loss = 0.0;
        for (long base = 0; base < n; base += config.batch_size) {
            const long batch = std::min<long>(config.batch_size, n - base);
            bundle->store.zero_grads();
            double batch_loss = 0.0;
            for (long i = 0; i < batch; ++i) {
                const PreparedSample& s = train_fold.samples[order[static_cast<size_t>(base + i)]];
                Tape tape;
                Var loss = sample_loss(tape, *bundle, config.task, s, true,
                                       mix_seed(config.seed, "step", static_cast<uint64_t>(step) * 4096 +
                                                                          static_cast<uint64_t>(i)));
                tape.backward(tape.scale(loss, 1.0 / static_cast<double>(batch)));
                batch_loss += loss.value()(0, 0) / static_cast<double>(batch);
            }
            if (!std::isfinite(batch_loss)) {
                diverged = true;
                diverged_epoch = epoch;
                break;
            }
            opt.step(linear_warmup_factor(step, config.warmup_steps, total_steps));
            ++step;
            epoch_loss += batch_loss;
        }
        if (diverged) break;

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_loss / static_cast<double>(batches_per_epoch);
        double val_loss = 0.0;
        for (const PreparedSample& s : val_fold.samples) {
            Tape tape;
            val_loss += sample_loss(tape, *bundle, config.task, s, false, 0).value()(0, 0);
        }
        stats.val_loss = val_fold.samples.empty()
                             ? 0.0
                             : val_loss / static_cast<double>(val_fold.samples.size());
        stats.val_metric = compute_val_metric(*bundle, config, val_fold);
        out.epochs.push_back(stats);
        if (stats.val_metric > best_metric) {
            best_metric = stats.val_metric;
            out.best_epoch = epoch;
            save_checkpoint(out.checkpoint_path, config, bundle->store);
        }
    }
    out.best_metric = out.best_epoch > 0 ? best_metric : 0.0;

    json manifest;
    manifest["config"] = json::parse(config.to_json());
    manifest["train_file"] = train_file.string();
    manifest["val_file"] = val_file.string();
    manifest["train_checksum"] = file_checksum_hex(train_file);
    manifest["val_checksum"] = file_checksum_hex(val_file);
    manifest["train_samples"] = train_fold.samples.size();
    manifest["val_samples"] = val_fold.samples.size();
    manifest["dropped_spans"] = train_fold.dropped_spans + val_fold.dropped_spans;
    manifest["entail_counts"] = train_fold.entail_counts;
    manifest["emotion_counts"] = train_fold.emotion_counts;
    manifest["entail_weights"] = entail_weights;
    manifest["emotion_weights"] = emotion_weights;
    manifest["epochs"] = epoch_stats_json(out.epochs);
    manifest["best_epoch"] = out.best_epoch;
    manifest["best_val_metric"] = out.best_metric;
    manifest["checkpoint"] = out.checkpoint_path.filename().string();
    manifest["optimizer_steps"] = step;
    manifest["diverged"] = diverged;
    std::ofstream mf(out.manifest_path);
    mf << manifest.dump(2) << "\n";
    mf.close();

    if (diverged)
        throw TrainingError("training diverged (non-finite loss) in epoch " +
                            std::to_string(diverged_epoch) + "; manifest written to " +
                            out.manifest_path.string());
    return out;
}

namespace {

struct LoadedCheckpoint {
    Checkpoint ckpt;
    std::unique_ptr<ModelBundle> bundle;
    PreparedFold fold;
};

LoadedCheckpoint load_for_inference(const fs::path& checkpoint_path, const fs::path& fold_file) {
    LoadedCheckpoint out;
    out.ckpt = load_checkpoint(checkpoint_path);
    const std::vector<Sample> samples = read_fold(fold_file);
    if (samples.empty()) throw InputError("fold " + fold_file.string() + " is empty");
    if (samples.front().with_context != out.ckpt.config.with_context)
        throw ConfigError("fold " + fold_file.string() + " was built " +
                          (samples.front().with_context ? "with" : "without") +
                          " conversational context but the checkpoint expects the opposite");
    out.fold = prepare_fold(samples, out.ckpt.config.task, out.ckpt.config.max_seq_len);
    out.bundle = build_bundle(out.ckpt.config, {1.0, 1.0}, {}, &out.ckpt);
    return out;
}

std::string emotion_label(int cls) {
    return cls >= 0 ? to_string(emotion_from_class_index(cls)) : std::string();
}

json span_prediction_json(const std::string& id, const SpanPrediction& p) {
    json j;
    j["sample_id"] = id;
    j["text"] = p.text;
    j["tok_start"] = p.tok_start;
    j["tok_end"] = p.tok_end;
    j["score"] = p.score;
    if (p.predicted_emotion >= 0) j["predicted_emotion"] = emotion_label(p.predicted_emotion);
    if (p.fallback) j["fallback"] = true;
    return j;
}

json entail_prediction_json(const std::string& id, const EntailPrediction& p) {
    json j;
    j["sample_id"] = id;
    j["label"] = p.label;
    j["prob"] = p.prob;
    if (p.aux_emotion >= 0) j["aux_emotion"] = emotion_label(p.aux_emotion);
    return j;
}

struct PredictionSink {
    std::vector<json> lines;
    std::vector<SpanEvalRecord> span_records;
    std::vector<int> entail_gold, entail_pred;
    std::vector<int> emotion_gold, emotion_pred;
    long inconsistent = 0;
    long fallbacks = 0;
};

PredictionSink predict_fold(const LoadedCheckpoint& lc, int beam_width) {
    PredictionSink sink;
    const RunConfig& cfg = lc.ckpt.config;
    for (const PreparedSample& s : lc.fold.samples) {
        switch (cfg.task) {
            case Task::cse: {
                const SpanPrediction p = lc.bundle->cse->predict(s.tok, s.id, beam_width);
                sink.lines.push_back(span_prediction_json(s.id, p));
                sink.span_records.push_back({s.gold_text, p.text, s.entail_label == 1});
                if (p.fallback) ++sink.fallbacks;
                if (p.predicted_emotion >= 0) {
                    sink.emotion_gold.push_back(s.emotion_class);
                    sink.emotion_pred.push_back(p.predicted_emotion);
                }
                break;
            }
            case Task::cee: {
                const EntailPrediction p = lc.bundle->cee->predict(s.tok, s.id);
                sink.lines.push_back(entail_prediction_json(s.id, p));
                sink.entail_gold.push_back(s.entail_label);
                sink.entail_pred.push_back(p.label);
                if (p.aux_emotion >= 0) {
                    sink.emotion_gold.push_back(s.emotion_class);
                    sink.emotion_pred.push_back(p.aux_emotion);
                }
                break;
            }
            case Task::e2e: {
                const E2ePrediction p = lc.bundle->e2e->predict(s.tok, s.id, beam_width);
                json line = span_prediction_json(s.id, p.span);
                line["label"] = p.entail.label;
                line["prob"] = p.entail.prob;
                line["consistent"] = p.consistent;
                sink.lines.push_back(line);
                sink.span_records.push_back({s.gold_text, p.span.text, s.entail_label == 1});
                sink.entail_gold.push_back(s.entail_label);
                sink.entail_pred.push_back(p.entail.label);
                if (p.span.predicted_emotion >= 0) {
                    sink.emotion_gold.push_back(s.emotion_class);
                    sink.emotion_pred.push_back(p.span.predicted_emotion);
                }
                if (!p.consistent) ++sink.inconsistent;
                if (p.span.fallback) ++sink.fallbacks;
                break;
            }
        }
    }
    return sink;
}

MetricsReport report_from_sink(const PredictionSink& sink, Task task, long dropped_spans) {
    MetricsReport report;
    if (task == Task::cse || task == Task::e2e) report = span_metrics(sink.span_records);
    if (task == Task::cee) {
        const EntailMetrics em = entail_metrics(sink.entail_gold, sink.entail_pred);
        report.f1_pos = em.f1_pos;
        report.f1_neg = em.f1_neg;
        report.macro_f1 = em.macro_f1;
        for (const std::string& f : em.flags) report.flags.push_back(f);
        if (auto acc = accuracy(sink.entail_gold, sink.entail_pred))
            report.extras["entail_acc"] = *acc;
    }
    if (task == Task::e2e && !sink.entail_gold.empty()) {
        const EntailMetrics em = entail_metrics(sink.entail_gold, sink.entail_pred);
        report.extras["entail_f1_pos"] = em.f1_pos;
        report.extras["entail_f1_neg"] = em.f1_neg;
        report.extras["entail_macro_f1"] = em.macro_f1;
        for (const std::string& f : em.flags) report.flags.push_back(f);
        if (auto acc = accuracy(sink.entail_gold, sink.entail_pred))
            report.extras["entail_acc"] = *acc;
        report.extras["inconsistent"] = static_cast<double>(sink.inconsistent);
    }
    if (!sink.emotion_gold.empty())
        report.emotion_acc = accuracy(sink.emotion_gold, sink.emotion_pred);
    if (sink.fallbacks > 0)
        report.flags.push_back(std::to_string(sink.fallbacks) +
                               " prediction(s) fell back to the empty span");
    if (dropped_spans > 0)
        report.flags.push_back(std::to_string(dropped_spans) +
                               " positive span(s) lost to truncation");
    return report;
}

void write_jsonl(const fs::path& path, const std::vector<json>& lines) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    for (const json& line : lines) out << line.dump() << "\n";
}

}  // namespace

EvalOutput eval_run(const fs::path& checkpoint_path, const fs::path& fold_file,
                    const fs::path& out_dir, std::optional<int> beam_width) {
    fs::create_directories(out_dir);
    const LoadedCheckpoint lc = load_for_inference(checkpoint_path, fold_file);
    const int k = beam_width.value_or(lc.ckpt.config.beam_width);
    const PredictionSink sink = predict_fold(lc, k);

    EvalOutput out;
    out.report = report_from_sink(sink, lc.ckpt.config.task, lc.fold.dropped_spans);
    out.predictions_path = out_dir / "predictions.jsonl";
    out.report_path = out_dir / "report.json";
    write_jsonl(out.predictions_path, sink.lines);
    std::ofstream rf(out.report_path);
    rf << out.report.to_json() << "\n";
    return out;
}

std::filesystem::path predict_run(const fs::path& checkpoint_path, const fs::path& fold_file,
                                  const fs::path& out_path, std::optional<int> beam_width) {
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    const LoadedCheckpoint lc = load_for_inference(checkpoint_path, fold_file);
    const PredictionSink sink = predict_fold(lc, beam_width.value_or(lc.ckpt.config.beam_width));
    write_jsonl(out_path, sink.lines);
    return out_path;
}

SweepOutput sweep_beam_run(const fs::path& checkpoint_path, const fs::path& fold_file,
                           std::vector<int> widths, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    if (widths.empty()) throw ConfigError("beam sweep needs at least one width");
    std::sort(widths.begin(), widths.end());
    widths.erase(std::unique(widths.begin(), widths.end()), widths.end());
    if (widths.front() < 1) throw ConfigError("beam widths must be positive");

    const LoadedCheckpoint lc = load_for_inference(checkpoint_path, fold_file);
    if (lc.ckpt.config.task == Task::cee)
        throw ConfigError("beam sweep needs a span-extraction checkpoint");

    SweepOutput out;
    for (int k : widths) {
        const PredictionSink sink = predict_fold(lc, k);
        out.points.push_back({k, f1_pos(sink.span_records).value_or(0.0)});
    }

    const double last = out.points.back().f1_pos;
    int saturation = out.points.back().beam_width;
    for (auto it = out.points.rbegin(); it != out.points.rend() && it->f1_pos == last; ++it)
        saturation = it->beam_width;
    out.saturation_k = saturation;
    out.saturated = out.points.size() >= 2 &&
                    out.points[out.points.size() - 2].f1_pos == last;

    json j;
    json rows = json::array();
    for (const SweepPoint& p : out.points)
        rows.push_back({{"beam_width", p.beam_width}, {"f1_pos", p.f1_pos}});
    j["points"] = rows;
    j["saturation_k"] = out.saturation_k;
    j["saturated"] = out.saturated;
    out.path = out_dir / "beam_sweep.json";
    std::ofstream sf(out.path);
    sf << j.dump(2) << "\n";
    return out;
}

}  // namespace mutec
