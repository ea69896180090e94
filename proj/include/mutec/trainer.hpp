#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mutec/fold.hpp"
#include "mutec/input_format.hpp"
#include "mutec/metrics.hpp"
#include "mutec/run_config.hpp"
#include "mutec/tokenizer.hpp"

namespace mutec {

// A fold sample tokenized and aligned for the model: gold token span ((0,0)
// for negatives and entailment-only inputs), entailment label, emotion class.
struct PreparedSample {
    std::string id;
    TokenizedInput tok;
    int gold_start = 0;
    int gold_end = 0;
    int entail_label = 0;
    int emotion_class = 0;
    std::string gold_text;  // annotated cause text, empty for negatives
};

struct PreparedFold {
    std::vector<PreparedSample> samples;
    long dropped_spans = 0;  // positives whose gold span fell off under truncation
    std::vector<long> entail_counts{0, 0};  // {negatives, positives}
    std::vector<long> emotion_counts;       // per cause-emotion class
    int fold_id = 1;
    bool with_context = true;
};

PreparedFold prepare_fold(const std::vector<Sample>& samples, Task task, int max_seq_len);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_metric = 0.0;  // F1 over positive spans for span tasks, macro F1 otherwise
};

struct TrainOutput {
    std::filesystem::path checkpoint_path;
    std::filesystem::path manifest_path;
    std::vector<EpochStats> epochs;
    int best_epoch = 0;  // 0 is the untrained initialization
    double best_metric = 0.0;
};

// One full training run, deterministic given config.seed. The checkpoint of
// the best validation metric is retained; the manifest records the config
// snapshot, dataset checksums, class statistics and the per-epoch losses.
// Non-finite losses abort with TrainingError after the manifest is written.
TrainOutput train_run(RunConfig config, const std::filesystem::path& train_file,
                      const std::filesystem::path& val_file,
                      const std::filesystem::path& out_dir);

struct EvalOutput {
    MetricsReport report;
    std::filesystem::path predictions_path;
    std::filesystem::path report_path;
};

// Restores a checkpoint, predicts over a fold file and writes the prediction
// JSONL plus the metrics report. Evaluating across folds is fine; a fold
// whose context convention disagrees with the checkpoint is an error.
EvalOutput eval_run(const std::filesystem::path& checkpoint_path,
                    const std::filesystem::path& fold_file, const std::filesystem::path& out_dir,
                    std::optional<int> beam_width = std::nullopt);

// Prediction file only, no metrics.
std::filesystem::path predict_run(const std::filesystem::path& checkpoint_path,
                                  const std::filesystem::path& fold_file,
                                  const std::filesystem::path& out_path,
                                  std::optional<int> beam_width = std::nullopt);

struct SweepPoint {
    int beam_width = 0;
    double f1_pos = 0.0;
};

struct SweepOutput {
    std::vector<SweepPoint> points;
    int saturation_k = 0;    // smallest width whose score never changes afterwards
    bool saturated = false;  // at least two trailing widths agree
    std::filesystem::path path;
};

// Re-decodes one span checkpoint at several beam widths and reports where the
// positive-span F1 saturates.
SweepOutput sweep_beam_run(const std::filesystem::path& checkpoint_path,
                           const std::filesystem::path& fold_file, std::vector<int> widths,
                           const std::filesystem::path& out_dir);

}  // namespace mutec
